#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "slitcpw/geometry.hpp"

namespace slitcpw {

/// mu0 / (2 pi) expressed in gauss * micrometre / ampere.
inline constexpr double kMu0Over2PiGaussMicron = 2000.0;

/// Closest approach (micrometres) to a conductor before a field
/// evaluation is refused as singular.
inline constexpr double kSingularProximityUm = 0.01;

struct DriveConditions {
  double input_power = 1.0;          ///< watts
  double frequency = 70e6;           ///< hertz
  double reference_impedance = 50.0; ///< ohms
};

/// Human-readable warnings for drive conditions outside the band over which
/// the quasi-static field pattern is expected to hold (70 MHz to 3 GHz).
std::vector<std::string> drive_warnings(const DriveConditions& drive);

/// Peak phasor amplitude of the microwave field at one point (gauss).
/// The cross-section is translation invariant along y, so By is always 0.
struct FieldSample {
  Eigen::Vector3d position;  ///< (x, y, z) micrometres
  Eigen::Vector3d b;         ///< (Bx, By, Bz) gauss
};

/// Uniform grid in the x-z cross-section; both ranges are inclusive.
struct Grid {
  double x0 = -150.0, x1 = 150.0, dx = 5.0;
  double z0 = 0.0, z1 = 60.0, dz = 5.0;

  int nx() const;
  int nz() const;
};

/// Parses "x0,x1,dx,z0,z1,dz".
Grid parse_grid(const std::string& text);

struct FieldMap {
  Grid grid;
  std::vector<FieldSample> samples;  ///< row-major: z outer, x inner
};

struct DepthProfile {
  double x = 0.0;                ///< lateral position of the profile, micrometres
  std::vector<double> z_values;  ///< micrometres
  std::vector<double> bx_values; ///< gauss
  double argmax_depth = 0.0;     ///< micrometres
  double max_bx = 0.0;           ///< gauss
  bool interior_maximum = false; ///< false when the maximum sits at the first depth
};

/// Complete elliptic integral of the first kind K(k) by the arithmetic-geometric
/// mean, with modulus k in [0, 1).
template <typename Scalar>
Scalar complete_elliptic_k(Scalar k) {
  if (!(k >= Scalar(0)) || !(k < Scalar(1))) {
    throw DomainError("elliptic modulus outside [0, 1)");
  }
  Scalar a = Scalar(1);
  Scalar b = std::sqrt((Scalar(1) - k) * (Scalar(1) + k));
  for (int i = 0; i < 64 && std::abs(a - b) > Scalar(1e-15) * a; ++i) {
    const Scalar next = Scalar(0.5) * (a + b);
    b = std::sqrt(a * b);
    a = next;
  }
  return Scalar(M_PI) / (Scalar(2) * a);
}

/// Effective permittivity of a coplanar waveguide on a substrate of finite
/// thickness (no backside metal).
double cpw_effective_permittivity(const WaveguideGeometry& geometry);

/// Characteristic impedance (ohms) of the unslit coplanar waveguide.
double cpw_impedance(const WaveguideGeometry& geometry);

/// Peak current (amperes) of a matched travelling wave carrying `drive.input_power`.
double power_to_current(const DriveConditions& drive, double z0);

/// Reflection magnitude in dB for a line impedance against a reference, floored at -200 dB.
double reflection_estimate(double z_line, double z_ref);

inline constexpr double kReflectionFloorDb = -200.0;

/// Field (Bx, Bz) in gauss of one filament at (x, z) micrometres.
Eigen::Vector2d b_field_of(const Filament& filament, double x, double z);

/// Superposed field (Bx, Bz) in gauss of every filament at (x, z). Throws
/// DomainError when the point is within 0.01 um of a conductor.
Eigen::Vector2d b_field_at(const FilamentSet& filaments, double x, double z);

/// Filaments for `geometry` driven by `drive`, with the peak current taken
/// from the matched-line impedance of the geometry.
FilamentSet driven_filaments(const WaveguideGeometry& geometry, const DriveConditions& drive,
                             Section section, int filaments_per_strip = kDefaultFilamentsPerStrip);

FieldMap field_map(const WaveguideGeometry& geometry, const DriveConditions& drive,
                   Section section, const Grid& grid);
FieldMap field_map(const FilamentSet& filaments, const Grid& grid);

struct LineScan {
  double x0 = -20.0, x1 = 20.0, dx = 1.0;
  double z = 8.1;
};

std::vector<FieldSample> line_scan(const WaveguideGeometry& geometry, const DriveConditions& drive,
                                   Section section, const LineScan& scan);
std::vector<FieldSample> line_scan(const FilamentSet& filaments, const LineScan& scan);

/// Bx at x = 0 sampled on [z_begin, z_end] every z_step, with the maximum
/// refined by golden-section search when it lies inside the range.
DepthProfile depth_profile(const WaveguideGeometry& geometry, const DriveConditions& drive,
                           Section section, double z_begin, double z_end, double z_step);
DepthProfile depth_profile(const FilamentSet& filaments, double z_begin, double z_end,
                           double z_step, double substrate_thickness);

/// `x_um,y_um,z_um,Bx_G,By_G,Bz_G`
void write_field_csv(std::ostream& out, const std::vector<FieldSample>& samples);
/// `z_um,Bx_G`
void write_depth_csv(std::ostream& out, const DepthProfile& profile);
/// `{ "argmax_depth_um": ..., "max_bx_G": ... }`
std::string depth_summary_json(const DepthProfile& profile);

}  // namespace slitcpw
