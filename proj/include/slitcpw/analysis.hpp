#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "slitcpw/spinphys.hpp"

namespace slitcpw {

/// In-plane field amplitude along x, in gauss or normalized units.
struct FieldProfile {
  std::vector<double> positions;  ///< x in micrometres, strictly increasing
  std::vector<double> values;
  std::optional<double> normalization_reference;  ///< value at x = 0 before normalizing
  std::vector<std::optional<double>> y_positions;  ///< optional metadata, unused by the 2-D model
};

void check(const FieldProfile& profile);

/// Inverse of the Rabi relation: B = f h / (sqrt(3) g mu_B), gauss.
double rabi_to_field(const SpinParams& params, double f_rabi);

struct FieldAndSplitting {
  double b0;  ///< gauss
  double d;   ///< MHz (D/h)
  std::optional<bool> plausible;  ///< set when a prior D interval is supplied
};

struct ResonanceInversion {
  FieldAndSplitting low_field;   ///< branch with g mu_B B0 < 2D
  FieldAndSplitting high_field;  ///< branch with g mu_B B0 > 2D
};

struct DInterval {
  double lo = 30.0;
  double hi = 40.0;
};

/// Both (B0, D) solutions consistent with an axial f+/f- pair. Neither is
/// preferred; a prior on D only sets the `plausible` flags.
ResonanceInversion b0_and_d_from_resonances(const SpinParams& params, double f_plus, double f_minus,
                                            const std::optional<DInterval>& prior = std::nullopt);

/// Linear interpolation on a strictly increasing abscissa; throws outside it.
double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x);

/// Divides every value by the value at x = 0 (interpolated if needed).
FieldProfile normalize_profile(const FieldProfile& profile);

struct ProfilePoint {
  double x;
  double measured;
  double simulated;
  double deviation;  ///< measured - simulated
};

struct ProfileComparison {
  double rms_deviation = 0.0;
  double max_deviation = 0.0;
  std::vector<ProfilePoint> points;
};

/// Deviation of `measured` from `simulated` resampled onto the measured positions.
ProfileComparison compare_profiles(const FieldProfile& measured, const FieldProfile& simulated);

std::string comparison_json(const ProfileComparison& comparison);

}  // namespace slitcpw
