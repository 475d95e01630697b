#include "slitcpw/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

namespace slitcpw {

namespace {

std::string describe(const std::vector<ConstraintViolation>& violations) {
  std::string message = "invalid waveguide geometry:";
  for (const auto& v : violations) {
    char value[32];
    std::snprintf(value, sizeof value, "%g", v.value);
    message += " " + v.field + "=" + value + " violates " + v.constraint + ";";
  }
  message.pop_back();
  return message;
}

struct KeyBinding {
  std::string_view key;
  double WaveguideGeometry::*member;
};

constexpr std::array<KeyBinding, 8> kKeys{{
    {"signal_width_um", &WaveguideGeometry::signal_width},
    {"gap_width_um", &WaveguideGeometry::gap_width},
    {"ground_width_um", &WaveguideGeometry::ground_width},
    {"slit_width_um", &WaveguideGeometry::slit_width},
    {"slit_length_um", &WaveguideGeometry::slit_length},
    {"metal_thickness_um", &WaveguideGeometry::metal_thickness},
    {"substrate_thickness_um", &WaveguideGeometry::substrate_thickness},
    {"eps_r", &WaveguideGeometry::substrate_rel_permittivity},
}};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Antisymmetric cosine-graded nodes on [-1, 1]: u[n - k] == -u[k] exactly.
std::vector<double> graded_nodes(int panels) {
  std::vector<double> u(panels + 1);
  for (int k = 0; 2 * k < panels; ++k) {
    u[k] = -std::cos(M_PI * k / panels);
    u[panels - k] = -u[k];
  }
  if (panels % 2 == 0) u[panels / 2] = 0.0;
  u.front() = -1.0;
  u.back() = 1.0;
  return u;
}

// Integral of ln|x - s| ds over s in [left, right].
double log_kernel(double x, double left, double right) {
  auto antiderivative = [](double u) {
    return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u;
  };
  return antiderivative(right - x) - antiderivative(left - x);
}

struct Panel {
  double left;
  double right;
  int strip;
};

}  // namespace

InvalidGeometry::InvalidGeometry(std::vector<ConstraintViolation> violations)
    : DomainError(describe(violations)), violations_(std::move(violations)) {}

std::vector<ConstraintViolation> check(const WaveguideGeometry& g) {
  std::vector<ConstraintViolation> out;
  auto positive = [&](std::string_view name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back({std::string(name), v, "> 0"});
  };
  positive("signal_width", g.signal_width);
  positive("gap_width", g.gap_width);
  positive("ground_width", g.ground_width);
  positive("slit_length", g.slit_length);
  positive("metal_thickness", g.metal_thickness);
  positive("substrate_thickness", g.substrate_thickness);
  if (!(g.slit_width >= 0.0) || !std::isfinite(g.slit_width)) {
    out.push_back({"slit_width", g.slit_width, ">= 0"});
  } else if (!(g.slit_width < g.signal_width)) {
    out.push_back({"slit_width", g.slit_width, "slit_width < signal_width"});
  }
  if (!(g.substrate_rel_permittivity >= 1.0) || !std::isfinite(g.substrate_rel_permittivity)) {
    out.push_back({"substrate_rel_permittivity", g.substrate_rel_permittivity, ">= 1"});
  }
  return out;
}

const WaveguideGeometry& validate(const WaveguideGeometry& geometry) {
  if (auto violations = check(geometry); !violations.empty()) {
    throw InvalidGeometry(std::move(violations));
  }
  return geometry;
}

WaveguideGeometry parse_geometry(std::string_view text) {
  WaveguideGeometry g;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DomainError("geometry line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value_text = trim(line.substr(eq + 1));
    const auto binding = std::find_if(kKeys.begin(), kKeys.end(),
                                      [&](const KeyBinding& b) { return b.key == key; });
    if (binding == kKeys.end()) {
      throw DomainError("geometry line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
    double value = 0.0;
    const auto [end, ec] =
        std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc{} || end != value_text.data() + value_text.size()) {
      throw DomainError("geometry line " + std::to_string(line_no) + ": bad number '" +
                        std::string(value_text) + "' for " + std::string(key));
    }
    g.*(binding->member) = value;
  }
  return g;
}

WaveguideGeometry load_geometry(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw DomainError("cannot open geometry file: " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_geometry(buffer.str());
}

std::string format_geometry(const WaveguideGeometry& g) {
  std::string out;
  for (const auto& b : kKeys) {
    char value[40];
    std::snprintf(value, sizeof value, "%.17g", g.*(b.member));
    out += std::string(b.key) + " = " + value + "\n";
  }
  return out;
}

std::string_view to_string(Section section) {
  return section == Section::with_slit ? "with-slit" : "without-slit";
}

Section parse_section(std::string_view text) {
  if (text == "with-slit" || text == "with_slit") return Section::with_slit;
  if (text == "without-slit" || text == "without_slit") return Section::without_slit;
  throw DomainError("unknown section '" + std::string(text) +
                    "' (expected with-slit or without-slit)");
}

double FilamentSet::net_current() const {
  return std::accumulate(filaments.begin(), filaments.end(), 0.0,
                         [](double acc, const Filament& f) { return acc + f.current; });
}

double FilamentSet::strip_current(int strip) const {
  double sum = 0.0;
  for (const auto& f : filaments) {
    if (f.strip == strip) sum += f.current;
  }
  return sum;
}

std::vector<Strip> conductor_strips(const WaveguideGeometry& geometry, Section section,
                                    double total_current) {
  validate(geometry);
  if (section == Section::with_slit && !geometry.has_slit()) {
    throw DomainError("with-slit section requested but slit_width is 0");
  }
  const double a = 0.5 * geometry.signal_width;
  const double inner = a + geometry.gap_width;
  const double outer = inner + geometry.ground_width;
  const double half = 0.5 * total_current;

  std::vector<Strip> strips;
  strips.push_back({-outer, -inner, StripRole::ground, -half});
  if (section == Section::with_slit) {
    const double s = 0.5 * geometry.slit_width;
    strips.push_back({-a, -s, StripRole::signal, half});
    strips.push_back({s, a, StripRole::signal, half});
  } else {
    strips.push_back({-a, a, StripRole::signal, total_current});
  }
  strips.push_back({inner, outer, StripRole::ground, -half});
  return strips;
}

FilamentSet build_filaments(const WaveguideGeometry& geometry, Section section,
                            double total_current, int filaments_per_strip) {
  if (filaments_per_strip < 2) throw DomainError("filaments_per_strip must be >= 2");
  if (!std::isfinite(total_current)) throw DomainError("total_current must be finite");

  FilamentSet set;
  set.section = section;
  set.strips = conductor_strips(geometry, section, total_current);
  const auto unit_strips = conductor_strips(geometry, section, 1.0);
  const int n_strips = static_cast<int>(set.strips.size());
  const int n = filaments_per_strip;
  const auto nodes = graded_nodes(n);

  // Panels on the x >= 0 side (plus the centred signal strip) are
  // discretized directly; the rest are exact mirror images.
  std::vector<Panel> right;
  for (int s = 0; s < n_strips; ++s) {
    const Strip& strip = set.strips[s];
    if (strip.right <= 0.0) continue;
    const double centre = 0.5 * (strip.left + strip.right);
    const double half = 0.5 * (strip.right - strip.left);
    std::vector<double> edges(n + 1);
    for (int k = 0; k <= n; ++k) edges[k] = centre + half * nodes[k];
    edges.front() = strip.left;
    edges.back() = strip.right;
    for (int k = 0; k < n; ++k) {
      if (edges[k + 1] <= 0.0) continue;  // left half of a centred strip
      right.push_back({edges[k], edges[k + 1], s});
    }
  }

  // Unknown: uniform current density per mirror orbit of panels; one unknown
  // vector potential per strip orbit.
  const int m = static_cast<int>(right.size());
  std::vector<int> strip_unknown(n_strips, -1);
  int n_potentials = 0;
  for (int s = 0; s < n_strips; ++s) {
    if (set.strips[s].right > 0.0) strip_unknown[s] = n_potentials++;
  }
  const int size = m + n_potentials;
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);

  for (int i = 0; i < m; ++i) {
    const double x = 0.5 * (right[i].left + right[i].right);
    for (int j = 0; j < m; ++j) {
      const Panel& p = right[j];
      double k = log_kernel(x, p.left, p.right);
      if (p.left != -p.right) k += log_kernel(x, -p.right, -p.left);
      system(i, j) = k;
    }
    system(i, m + strip_unknown[right[i].strip]) = -1.0;
  }
  for (int j = 0; j < m; ++j) {
    const Panel& p = right[j];
    const Strip& strip = set.strips[p.strip];
    // A centred strip owns both members of each orbit.
    const double multiplicity = (strip.left < 0.0 && p.left != -p.right) ? 2.0 : 1.0;
    system(m + strip_unknown[p.strip], j) = multiplicity * (p.right - p.left);
  }
  for (int s = 0; s < n_strips; ++s) {
    if (strip_unknown[s] >= 0) {
      rhs(m + strip_unknown[s]) = unit_strips[s].current;
    }
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const Eigen::VectorXd solution = lu.solve(rhs);
  if (!solution.allFinite()) throw NumericalError("current distribution solve failed");

  // Per-unit-current panel currents, renormalized so every strip carries
  // exactly its assignment.
  std::vector<double> unit_current(m);
  std::vector<double> strip_sum(n_strips, 0.0);
  for (int j = 0; j < m; ++j) {
    unit_current[j] = solution(j) * (right[j].right - right[j].left);
    const Strip& strip = set.strips[right[j].strip];
    const double multiplicity = (strip.left < 0.0 && right[j].left != -right[j].right) ? 2.0 : 1.0;
    strip_sum[right[j].strip] += multiplicity * unit_current[j];
  }
  for (int j = 0; j < m; ++j) {
    const int s = right[j].strip;
    unit_current[j] *= unit_strips[s].current / strip_sum[s];
  }

  auto mirror_strip = [&](int s) {
    const Strip& strip = set.strips[s];
    for (int t = 0; t < n_strips; ++t) {
      if (set.strips[t].left == -strip.right && set.strips[t].right == -strip.left) return t;
    }
    throw NumericalError("conductor layout is not mirror-symmetric");
  };

  std::vector<Filament> mirrored;
  for (int j = m - 1; j >= 0; --j) {
    const Panel& p = right[j];
    if (p.left == -p.right) continue;  // self-mirrored panel of a centred strip
    mirrored.push_back({-p.right, -p.left, unit_current[j] * total_current, mirror_strip(p.strip)});
  }
  set.filaments = std::move(mirrored);
  for (int j = 0; j < m; ++j) {
    set.filaments.push_back({right[j].left, right[j].right, unit_current[j] * total_current, right[j].strip});
  }
  std::stable_sort(set.filaments.begin(), set.filaments.end(),
                   [](const Filament& a, const Filament& b) { return a.left < b.left; });
  return set;
}

}  // namespace slitcpw
