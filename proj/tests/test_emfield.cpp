#include "doctest.h"
#include "slitcpw/emfield.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace slitcpw;

namespace {

// K(k) by composite Simpson over theta in [0, pi/2].
double elliptic_k_quadrature(double k) {
  const int n = 20000;
  const double h = 0.5 * std::numbers::pi / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = std::sin(i * h);
    const double f = 1.0 / std::sqrt(1.0 - k * k * s * s);
    sum += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return sum * h / 3.0;
}

FilamentSet default_set(double current = 0.2, Section section = Section::with_slit, int n = 200) {
  return build_filaments(WaveguideGeometry{}, section, current, n);
}

}  // namespace

TEST_SUITE("emfield") {

TEST_CASE("elliptic K matches quadrature") {
  for (double k : {0.0, 0.1, 0.5, 0.9, 0.99}) {
    CHECK(complete_elliptic_k(k) == doctest::Approx(elliptic_k_quadrature(k)).epsilon(1e-10));
  }
  CHECK(complete_elliptic_k(0.0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(complete_elliptic_k(0.0f) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
}

TEST_CASE("impedance of the default device") {
  const double z0 = cpw_impedance(WaveguideGeometry{});
  CHECK(z0 >= 46.5);
  CHECK(z0 <= 53.5);
}

TEST_CASE("thick substrate reduces to the infinite-substrate closed form") {
  WaveguideGeometry g;
  g.substrate_thickness = 1e6;
  const double k0 = (g.signal_width / 2) / (g.signal_width / 2 + g.gap_width);
  const double kp = std::sqrt(1 - k0 * k0);
  const double eps_eff = (1 + g.substrate_rel_permittivity) / 2;
  const double expected = 30 * std::numbers::pi / std::sqrt(eps_eff) * complete_elliptic_k(kp) / complete_elliptic_k(k0);
  CHECK(cpw_effective_permittivity(g) == doctest::Approx(eps_eff).epsilon(1e-6));
  CHECK(cpw_impedance(g) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("vacuum substrate gives about 115 ohm") {
  WaveguideGeometry g;
  g.substrate_rel_permittivity = 1.0;
  CHECK(std::abs(cpw_impedance(g) - 115.0) < 11.5);
  CHECK(cpw_effective_permittivity(g) == doctest::Approx(1.0));
}

TEST_CASE("impedance grows with the gap") {
  WaveguideGeometry g;
  double last = 0.0;
  for (double gap : {10.0, 20.0, 40.0, 80.0}) {
    g.gap_width = gap;
    const double z0 = cpw_impedance(g);
    CHECK(z0 > last);
    last = z0;
  }
}

TEST_CASE("drive current and reflection") {
  CHECK(power_to_current({1.0, 70e6, 50.0}, 50.0) == doctest::Approx(0.2));
  CHECK(reflection_estimate(50.0, 50.0) <= -200.0);
  CHECK(reflection_estimate(75.0, 50.0) == doctest::Approx(20 * std::log10(0.2)));
  CHECK_THROWS_AS(power_to_current({-1.0, 70e6, 50.0}, 50.0), DomainError);
  CHECK(drive_warnings({1.0, 70e6, 50.0}).empty());
  CHECK_FALSE(drive_warnings({1.0, 10e9, 50.0}).empty());
}

TEST_CASE("isolated line current") {
  FilamentSet set;
  set.strips.push_back({0.0, 0.0, StripRole::signal, 0.2});
  set.filaments.push_back({0.0, 0.0, 0.2, 0});
  const auto b = b_field_at(set, 0.0, 20.0);
  CHECK(b.x() == doctest::Approx(20.0));  // mu0 I / (2 pi r) = 2e-7 * 0.2 / 20e-6 T
  CHECK(std::abs(b.y()) < 1e-15);
  const auto side = b_field_at(set, 20.0, 0.5);
  CHECK(side.y() < 0.0);
}

TEST_CASE("wide ribbon approaches a line current far away") {
  FilamentSet ribbon;
  ribbon.strips.push_back({-5.0, 5.0, StripRole::signal, 1.0});
  ribbon.filaments.push_back({-5.0, 5.0, 1.0, 0});
  FilamentSet line = ribbon;
  line.filaments[0].left = line.filaments[0].right = 0.0;
  const auto a = b_field_at(ribbon, 300.0, 400.0), b = b_field_at(line, 300.0, 400.0);
  CHECK(a.x() == doctest::Approx(b.x()).epsilon(1e-3));
  CHECK(a.y() == doctest::Approx(b.y()).epsilon(1e-3));
}

TEST_CASE("field inside a conductor is refused") {
  const FilamentSet set = default_set();
  CHECK_THROWS_AS(b_field_at(set, 30.0, 0.0), DomainError);
  CHECK_THROWS_AS(b_field_at(set, 30.0, 0.005), DomainError);
  CHECK_NOTHROW(b_field_at(set, 0.0, 0.0));
}

TEST_CASE("symmetry: Bx even and Bz odd in x") {
  const FilamentSet set = default_set();
  for (double z : {0.5, 1.7, 8.1, 26.0, 150.0}) {
    for (double x : {0.0, 3.0, 17.0, 45.0, 70.0, 200.0, 400.0}) {
      const auto p = b_field_at(set, x, z), m = b_field_at(set, -x, z);
      CHECK(std::abs(p.x() - m.x()) < 1e-10);
      CHECK(std::abs(p.y() + m.y()) < 1e-10);
    }
    CHECK(std::abs(b_field_at(set, 0.0, z).y()) < 1e-10);
  }
  CHECK(std::abs(b_field_at(set, 0.0, 0.0).x()) < 1e-10);
}

TEST_CASE("field scales as sqrt(power)") {
  const WaveguideGeometry g;
  const auto one = driven_filaments(g, {1.0, 70e6, 50.0}, Section::with_slit);
  const auto four = driven_filaments(g, {4.0, 70e6, 50.0}, Section::with_slit);
  for (double x : {-30.0, 0.0, 12.0, 65.0}) {
    const auto a = b_field_at(one, x, 8.1), b = b_field_at(four, x, 8.1);
    CHECK(std::abs(b.x() - 2.0 * a.x()) <= 1e-12 * std::abs(b.x()) + 1e-14);
    CHECK(std::abs(b.y() - 2.0 * a.y()) <= 1e-12 * std::abs(b.y()) + 1e-14);
  }
}

TEST_CASE("superposition over filaments") {
  const FilamentSet set = default_set(0.2, Section::with_slit, 40);
  for (double x : {-70.0, 0.0, 33.0}) {
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (const auto& f : set.filaments) sum += b_field_of(f, x, 5.0);
    CHECK((sum - b_field_at(set, x, 5.0)).norm() < 1e-12);
  }
}

TEST_CASE("far field is suppressed by the return currents") {
  const FilamentSet set = default_set();
  FilamentSet signal_only = set;
  signal_only.filaments.clear();
  for (const auto& f : set.filaments) {
    if (set.strips[f.strip].role == StripRole::signal) signal_only.filaments.push_back(f);
  }
  const double r = 10.0 * WaveguideGeometry{}.total_width();
  for (double angle : {0.3, 0.8, 1.5707963}) {
    const double x = r * std::cos(angle), z = r * std::sin(angle);
    CHECK(b_field_at(set, x, z).norm() <= 0.05 * b_field_at(signal_only, x, z).norm());
  }
}

TEST_CASE("discretization converges") {
  const FilamentSet coarse = default_set(0.2, Section::with_slit, 100);
  const FilamentSet fine = default_set(0.2, Section::with_slit, 200);
  for (double z : {1.0, 8.1, 26.0}) {
    for (double x : {0.0, -16.0, 60.0}) {
      const auto a = b_field_at(coarse, x, z), b = b_field_at(fine, x, z);
      CHECK((a - b).norm() < 0.005 * b.norm() + 1e-9);
    }
  }
}

TEST_CASE("gap field is mostly vertical and crosses zero in x") {
  const FilamentSet set = driven_filaments(WaveguideGeometry{}, {}, Section::with_slit);
  const auto gap = b_field_at(set, 70.0, 2.0);
  CHECK(std::abs(gap.y()) > std::abs(gap.x()));
  const auto scan = line_scan(set, {52.0, 88.0, 0.5, 8.1});
  bool crosses = false;
  for (std::size_t i = 1; i < scan.size(); ++i) crosses = crosses || scan[i - 1].b.x() * scan[i].b.x() <= 0.0;
  CHECK(crosses);
}

TEST_CASE("grid parsing and field map layout") {
  const Grid grid = parse_grid("-10,10,5,1,3,1");
  CHECK(grid.nx() == 5);
  CHECK(grid.nz() == 3);
  CHECK_THROWS_AS(parse_grid("1,2,3"), DomainError);
  CHECK_THROWS_AS(parse_grid("0,1,0,0,1,1"), DomainError);
  const FieldMap map = field_map(default_set(0.2, Section::with_slit, 40), grid);
  REQUIRE(map.samples.size() == 15);
  CHECK(map.samples[1].position.x() == doctest::Approx(-5.0));
  CHECK(map.samples[5].position.z() == doctest::Approx(2.0));
  std::ostringstream os;
  write_field_csv(os, map.samples);
  CHECK(os.str().rfind("x_um,y_um,z_um,Bx_G,By_G,Bz_G\n", 0) == 0);
}

TEST_CASE("grid nodes on a conductor are nudged off it") {
  const FieldMap map = field_map(default_set(0.2, Section::with_slit, 40), parse_grid("30,30,1,0,0,1"));
  REQUIRE(map.samples.size() == 1);
  CHECK(map.samples[0].position.z() > 0.0);
}

TEST_CASE("depth profile of the default device") {
  const WaveguideGeometry g;
  const auto slit = depth_profile(g, {}, Section::with_slit, 0.5, 300.0, 0.5);
  CHECK(slit.interior_maximum);
  CHECK(slit.argmax_depth >= 15.0);
  CHECK(slit.argmax_depth <= 40.0);
  CHECK(slit.max_bx >= 2.0);
  CHECK(slit.max_bx <= 5.0);
  const auto plain = depth_profile(g, {}, Section::without_slit, 0.5, 300.0, 0.5);
  CHECK_FALSE(plain.interior_maximum);
  for (std::size_t i = 1; i < plain.bx_values.size(); ++i) CHECK(plain.bx_values[i] < plain.bx_values[i - 1]);
  CHECK_THROWS_AS(depth_profile(g, {}, Section::with_slit, 0.5, 400.0, 0.5), DomainError);
}

}
