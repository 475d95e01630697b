#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slitcpw/analysis.hpp"
#include "slitcpw/emfield.hpp"
#include "slitcpw/fitting.hpp"
#include "slitcpw/spinphys.hpp"

namespace slitcpw {

/// Bx(x, z) from the field model sampled at `positions`.
FieldProfile simulated_profile(const FilamentSet& filaments, const std::vector<double>& positions, double z);

/// Settings for turning a simulated field into a synthetic Rabi measurement.
struct RabiMeasurement {
  double a_rabi = 0.01;
  double t2_star = 1.0;    ///< us
  double duration = 2.0;   ///< us, sweep span starting at 0
  double step = 0.002;     ///< us
  Noise noise;
};

/// Field profile recovered the way a measurement would: synthesize a Rabi
/// trace from the simulated Bx at each position, fit it, and convert the
/// fitted Rabi frequency back to a field.
FieldProfile rabi_derived_profile(const FilamentSet& filaments, const SpinParams& spin,
                                  const std::vector<double>& positions, double z,
                                  const RabiMeasurement& measurement = {});

struct DepthSweepEntry {
  double slit_width;
  DepthProfile profile;
};

/// Depth profiles at x = 0 for each slit width (0 = no slit) with everything
/// else taken from `geometry`.
std::vector<DepthSweepEntry> depth_sweep(const WaveguideGeometry& geometry, const DriveConditions& drive,
                                         const std::vector<double>& slit_widths, double z_begin = 0.5,
                                         double z_end = 300.0, double z_step = 0.5);

struct CheckResult {
  std::string id;
  std::string description;
  bool passed;
  std::string detail;
};

/// Runs the field, spin and fitting pipelines on the default device and
/// scores each against a fixed tolerance.
std::vector<CheckResult> reproduce_paper(std::uint64_t seed = 0);

std::string format_check_table(const std::vector<CheckResult>& checks);

}  // namespace slitcpw
