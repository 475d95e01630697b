#include "slitcpw/emfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

#include "slitcpw/io.hpp"

namespace slitcpw {

namespace {

double distance_to(const Filament& f, double x, double z) {
  const double dx = std::max({f.left - x, 0.0, x - f.right});
  return std::hypot(dx, z);
}

int steps_in(double begin, double end, double step) {
  if (!(step > 0.0)) throw DomainError("grid step must be > 0");
  if (end < begin) throw DomainError("grid range is empty");
  return static_cast<int>(std::floor((end - begin) / step + 1e-9)) + 1;
}

// Node shifted by half a step in z when it sits on a conductor.
Eigen::Vector2d sample_avoiding(const FilamentSet& filaments, double x, double& z, double dz) {
  for (const auto& f : filaments.filaments) {
    if (distance_to(f, x, z) < kSingularProximityUm) {
      z += 0.5 * dz;
      break;
    }
  }
  return b_field_at(filaments, x, z);
}

}  // namespace

std::vector<std::string> drive_warnings(const DriveConditions& drive) {
  std::vector<std::string> out;
  if (drive.frequency < 70e6 || drive.frequency > 3e9) {
    out.push_back("frequency " + format_number(drive.frequency / 1e6) +
                  " MHz is outside 70 MHz - 3 GHz; the quasi-static field pattern is unverified there");
  }
  return out;
}

int Grid::nx() const { return steps_in(x0, x1, dx); }
int Grid::nz() const { return steps_in(z0, z1, dz); }

Grid parse_grid(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0') throw DomainError("bad grid value '" + item + "'");
    values.push_back(v);
  }
  if (values.size() != 6) throw DomainError("grid must be x0,x1,dx,z0,z1,dz");
  Grid g{values[0], values[1], values[2], values[3], values[4], values[5]};
  g.nx();
  g.nz();
  return g;
}

double cpw_effective_permittivity(const WaveguideGeometry& geometry) {
  validate(geometry);
  const double a = 0.5 * geometry.signal_width;
  const double b = a + geometry.gap_width;
  const double h = geometry.substrate_thickness;
  const double k0 = a / b;
  const double k1 = std::sinh(M_PI * a / (2.0 * h)) / std::sinh(M_PI * b / (2.0 * h));
  auto complement = [](double k) { return std::sqrt((1.0 - k) * (1.0 + k)); };
  const double ratio = complete_elliptic_k(k1) * complete_elliptic_k(complement(k0)) /
                       (complete_elliptic_k(complement(k1)) * complete_elliptic_k(k0));
  return 1.0 + 0.5 * (geometry.substrate_rel_permittivity - 1.0) * ratio;
}

double cpw_impedance(const WaveguideGeometry& geometry) {
  const double eps_eff = cpw_effective_permittivity(geometry);
  const double k0 = 0.5 * geometry.signal_width / (0.5 * geometry.signal_width + geometry.gap_width);
  const double k0c = std::sqrt((1.0 - k0) * (1.0 + k0));
  return 30.0 * M_PI / std::sqrt(eps_eff) * complete_elliptic_k(k0c) / complete_elliptic_k(k0);
}

double power_to_current(const DriveConditions& drive, double z0) {
  if (!(z0 > 0.0)) throw DomainError("impedance must be > 0");
  if (!(drive.input_power >= 0.0)) throw DomainError("input power must be >= 0");
  return std::sqrt(2.0 * drive.input_power / z0);
}

double reflection_estimate(double z_line, double z_ref) {
  if (!(z_line > 0.0) || !(z_ref > 0.0)) throw DomainError("impedances must be > 0");
  const double gamma = std::abs(z_line - z_ref) / (z_line + z_ref);
  if (gamma == 0.0) return kReflectionFloorDb;
  return std::max(kReflectionFloorDb, 20.0 * std::log10(gamma));
}

Eigen::Vector2d b_field_of(const Filament& f, double x, double z) {
  const double width = f.width();
  if (width == 0.0) {
    const double dx = x - f.left;
    const double r2 = dx * dx + z * z;
    const double scale = kMu0Over2PiGaussMicron * f.current / r2;
    return {scale * z, -scale * dx};
  }
  // Uniform sheet: Bx follows the subtended angle, Bz the log distance ratio.
  const double density = kMu0Over2PiGaussMicron * f.current / width;
  const double sign = (z > 0.0) - (z < 0.0);
  const double dot = (f.left - x) * (f.right - x) + z * z;
  const double angle = std::atan2(width * std::abs(z), dot);
  const double dr2 = (x - f.right) * (x - f.right) + z * z;
  const double log_ratio = std::log1p(2.0 * width * (x - f.position()) / dr2);
  return {density * sign * angle, -0.5 * density * log_ratio};
}

Eigen::Vector2d b_field_at(const FilamentSet& filaments, double x, double z) {
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (const auto& f : filaments.filaments) {
    if (distance_to(f, x, z) < kSingularProximityUm) {
      throw DomainError("field point (x=" + format_number(x) + " um, z=" + format_number(z) +
                        " um) is within 0.01 um of a conductor");
    }
    b += b_field_of(f, x, z);
  }
  return b;
}

FilamentSet driven_filaments(const WaveguideGeometry& geometry, const DriveConditions& drive,
                             Section section, int filaments_per_strip) {
  const double current = power_to_current(drive, cpw_impedance(geometry));
  return build_filaments(geometry, section, current, filaments_per_strip);
}

FieldMap field_map(const FilamentSet& filaments, const Grid& grid) {
  FieldMap map{grid, {}};
  const int nx = grid.nx();
  const int nz = grid.nz();
  map.samples.reserve(static_cast<std::size_t>(nx) * nz);
  for (int iz = 0; iz < nz; ++iz) {
    for (int ix = 0; ix < nx; ++ix) {
      const double x = grid.x0 + ix * grid.dx;
      double z = grid.z0 + iz * grid.dz;
      const Eigen::Vector2d b = sample_avoiding(filaments, x, z, grid.dz);
      map.samples.push_back({{x, 0.0, z}, {b.x(), 0.0, b.y()}});
    }
  }
  return map;
}

FieldMap field_map(const WaveguideGeometry& geometry, const DriveConditions& drive,
                   Section section, const Grid& grid) {
  return field_map(driven_filaments(geometry, drive, section), grid);
}

std::vector<FieldSample> line_scan(const FilamentSet& filaments, const LineScan& scan) {
  std::vector<FieldSample> out;
  const int n = steps_in(scan.x0, scan.x1, scan.dx);
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = scan.x0 + i * scan.dx;
    const Eigen::Vector2d b = b_field_at(filaments, x, scan.z);
    out.push_back({{x, 0.0, scan.z}, {b.x(), 0.0, b.y()}});
  }
  return out;
}

std::vector<FieldSample> line_scan(const WaveguideGeometry& geometry, const DriveConditions& drive,
                                   Section section, const LineScan& scan) {
  return line_scan(driven_filaments(geometry, drive, section), scan);
}

DepthProfile depth_profile(const FilamentSet& filaments, double z_begin, double z_end,
                           double z_step, double substrate_thickness) {
  if (!(z_begin > 0.0) || !(z_end <= substrate_thickness)) {
    throw DomainError("depth range must lie within (0, substrate_thickness]");
  }
  const int n = steps_in(z_begin, z_end, z_step);
  DepthProfile profile;
  profile.z_values.reserve(n);
  profile.bx_values.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = z_begin + i * z_step;
    profile.z_values.push_back(z);
    profile.bx_values.push_back(b_field_at(filaments, 0.0, z).x());
  }
  const auto best = std::max_element(profile.bx_values.begin(), profile.bx_values.end());
  const auto i = static_cast<int>(best - profile.bx_values.begin());
  profile.argmax_depth = profile.z_values[i];
  profile.max_bx = *best;
  profile.interior_maximum = i > 0 && i < n - 1;
  if (!profile.interior_maximum) return profile;

  // Golden-section refinement inside the bracketing samples.
  auto bx = [&](double z) { return b_field_at(filaments, 0.0, z).x(); };
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = profile.z_values[i - 1];
  double hi = profile.z_values[i + 1];
  double c = hi - ratio * (hi - lo);
  double d = lo + ratio * (hi - lo);
  double fc = bx(c);
  double fd = bx(d);
  while (hi - lo > 1e-7) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = bx(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = bx(d);
    }
  }
  const double z_star = 0.5 * (lo + hi);
  const double b_star = bx(z_star);
  if (b_star > profile.max_bx) {
    profile.argmax_depth = z_star;
    profile.max_bx = b_star;
  }
  return profile;
}

DepthProfile depth_profile(const WaveguideGeometry& geometry, const DriveConditions& drive,
                           Section section, double z_begin, double z_end, double z_step) {
  return depth_profile(driven_filaments(geometry, drive, section), z_begin, z_end, z_step,
                       geometry.substrate_thickness);
}

void write_field_csv(std::ostream& out, const std::vector<FieldSample>& samples) {
  out << "x_um,y_um,z_um,Bx_G,By_G,Bz_G\n";
  for (const auto& s : samples) {
    out << format_number(s.position.x()) << ',' << format_number(s.position.y()) << ','
        << format_number(s.position.z()) << ',' << format_number(s.b.x()) << ','
        << format_number(s.b.y()) << ',' << format_number(s.b.z()) << '\n';
  }
}

void write_depth_csv(std::ostream& out, const DepthProfile& profile) {
  out << format_two_column_csv("z_um", "Bx_G", profile.z_values, profile.bx_values);
}

std::string depth_summary_json(const DepthProfile& profile) {
  nlohmann::ordered_json j;
  j["argmax_depth_um"] = profile.argmax_depth;
  j["max_bx_G"] = profile.max_bx;
  j["interior_maximum"] = profile.interior_maximum;
  return j.dump(2) + "\n";
}

}  // namespace slitcpw
