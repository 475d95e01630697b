#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "slitcpw/errors.hpp"

namespace slitcpw {

/// Cross-section of a coplanar waveguide whose signal line carries a
/// longitudinal slit. All lengths are in micrometres. The layout is
/// mirror-symmetric about x = 0 (the slit centre); conductors lie in the
/// plane z = 0 and z grows into the substrate.
struct WaveguideGeometry {
  double signal_width = 100.0;
  double gap_width = 40.0;
  double ground_width = 200.0;
  double slit_width = 40.0;  ///< 0 means a plain coplanar waveguide
  double slit_length = 300.0;
  double metal_thickness = 2.0;
  double substrate_thickness = 300.0;
  double substrate_rel_permittivity = 9.66;

  bool has_slit() const { return slit_width > 0.0; }
  double total_width() const { return signal_width + 2.0 * (gap_width + ground_width); }
};

struct ConstraintViolation {
  std::string field;
  double value;
  std::string constraint;
};

class InvalidGeometry : public DomainError {
 public:
  explicit InvalidGeometry(std::vector<ConstraintViolation> violations);
  const std::vector<ConstraintViolation>& violations() const { return violations_; }

 private:
  std::vector<ConstraintViolation> violations_;
};

/// Every violated invariant of `geometry`; empty when the geometry is valid.
std::vector<ConstraintViolation> check(const WaveguideGeometry& geometry);

/// Returns `geometry` unchanged, or throws InvalidGeometry listing every violation.
const WaveguideGeometry& validate(const WaveguideGeometry& geometry);

/// Parses `key = value` lines (blank lines and `#` comments allowed). Keys:
/// signal_width_um, gap_width_um, ground_width_um, slit_width_um,
/// slit_length_um, metal_thickness_um, substrate_thickness_um, eps_r.
/// Missing keys keep their defaults; unknown keys and malformed numbers throw.
WaveguideGeometry parse_geometry(std::string_view text);
WaveguideGeometry load_geometry(const std::filesystem::path& path);
std::string format_geometry(const WaveguideGeometry& geometry);

enum class Section { with_slit, without_slit };

std::string_view to_string(Section section);
Section parse_section(std::string_view text);

enum class StripRole { signal, ground };

/// One conductor strip of the cross-section and the net current it carries.
struct Strip {
  double left;
  double right;
  StripRole role;
  double current;  ///< amperes, signed
};

/// A thin current ribbon spanning [left, right] at z = 0. A ribbon of zero
/// width is an ideal line current.
struct Filament {
  double left;
  double right;
  double current;  ///< amperes, signed
  int strip;       ///< index into FilamentSet::strips

  double position() const { return 0.5 * (left + right); }
  double width() const { return right - left; }
};

/// Discretized conductor layout of one cross-section. Filaments are ordered
/// by increasing x and grouped by strip.
struct FilamentSet {
  Section section = Section::with_slit;
  std::vector<Strip> strips;
  std::vector<Filament> filaments;

  double net_current() const;
  double strip_current(int strip) const;
};

inline constexpr int kDefaultFilamentsPerStrip = 200;

/// Conductor strips of the requested section, ordered left to right, with
/// the signal current split evenly between slit halves and -I/2 on each ground.
std::vector<Strip> conductor_strips(const WaveguideGeometry& geometry, Section section,
                                    double total_current);

/// Discretizes each strip into `filaments_per_strip` ribbons with cosine-graded
/// edges and solves for the quasi-static (equal vector potential) current
/// distribution subject to the per-strip current assignment.
FilamentSet build_filaments(const WaveguideGeometry& geometry, Section section,
                            double total_current,
                            int filaments_per_strip = kDefaultFilamentsPerStrip);

}  // namespace slitcpw
