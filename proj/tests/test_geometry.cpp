#include "doctest.h"
#include "slitcpw/geometry.hpp"

#include <cmath>

using namespace slitcpw;

TEST_SUITE("geometry") {

TEST_CASE("default layout is valid and 580 um wide") {
  const WaveguideGeometry g;
  CHECK(check(g).empty());
  CHECK(g.has_slit());
  CHECK(g.total_width() == doctest::Approx(580.0));
}

TEST_CASE("every violation is reported at once") {
  WaveguideGeometry g;
  g.signal_width = -1.0;
  g.gap_width = 0.0;
  g.substrate_rel_permittivity = 0.5;
  const auto v = check(g);
  CHECK(v.size() >= 3);
  CHECK_THROWS_AS(validate(g), InvalidGeometry);
  try {
    validate(g);
  } catch (const InvalidGeometry& e) {
    CHECK(e.violations().size() == v.size());
  }
}

TEST_CASE("slit must be narrower than the signal line") {
  WaveguideGeometry g;
  g.slit_width = g.signal_width;
  REQUIRE(check(g).size() == 1);
  CHECK(check(g)[0].field == "slit_width");
}

TEST_CASE("geometry text round-trips") {
  WaveguideGeometry g;
  g.signal_width = 1000.0;
  g.slit_width = 12.5;
  g.substrate_rel_permittivity = 1.0;
  const WaveguideGeometry back = parse_geometry(format_geometry(g));
  CHECK(back.signal_width == g.signal_width);
  CHECK(back.slit_width == g.slit_width);
  CHECK(back.substrate_rel_permittivity == g.substrate_rel_permittivity);
  CHECK(back.ground_width == g.ground_width);
}

TEST_CASE("parser rejects unknown keys and bad numbers") {
  CHECK(parse_geometry("# comment\n\neps_r = 4\n").substrate_rel_permittivity == 4.0);
  CHECK_THROWS_AS(parse_geometry("colour=red\n"), DomainError);
  CHECK_THROWS_AS(parse_geometry("gap_width_um=4x\n"), DomainError);
  CHECK_THROWS_AS(parse_geometry("gap_width_um\n"), DomainError);
  CHECK_THROWS_AS(load_geometry("/nonexistent/geometry.txt"), DomainError);
}

TEST_CASE("section names") {
  CHECK(parse_section("with-slit") == Section::with_slit);
  CHECK(parse_section(to_string(Section::without_slit)) == Section::without_slit);
  CHECK_THROWS_AS(parse_section("slit"), DomainError);
}

TEST_CASE("strip layout is mirror symmetric with zero net current") {
  const WaveguideGeometry g;
  const auto with = conductor_strips(g, Section::with_slit, 2.0);
  REQUIRE(with.size() == 4);
  CHECK(with[1].right == doctest::Approx(-20.0));
  CHECK(with[2].left == doctest::Approx(20.0));
  CHECK(with[0].left == doctest::Approx(-290.0));
  double net = 0.0;
  for (std::size_t i = 0; i < with.size(); ++i) {
    net += with[i].current;
    CHECK(with[i].left == doctest::Approx(-with[with.size() - 1 - i].right));
  }
  CHECK(std::abs(net) < 1e-15);
  CHECK(conductor_strips(g, Section::without_slit, 2.0).size() == 3);

  WaveguideGeometry plain = g;
  plain.slit_width = 0.0;
  CHECK_THROWS_AS(conductor_strips(plain, Section::with_slit, 1.0), DomainError);
}

TEST_CASE("filament currents sum to each strip current") {
  const WaveguideGeometry g;
  const FilamentSet set = build_filaments(g, Section::with_slit, 0.2, 40);
  CHECK(set.filaments.size() == 160);
  CHECK(std::abs(set.net_current()) < 1e-14);
  for (std::size_t s = 0; s < set.strips.size(); ++s) {
    CHECK(set.strip_current(static_cast<int>(s)) == doctest::Approx(set.strips[s].current).epsilon(1e-12));
  }
  // Exact mirror antisymmetry of the discretization and the current density.
  const auto& f = set.filaments;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& m = f[f.size() - 1 - i];
    CHECK(f[i].left == -m.right);
    CHECK(f[i].current == doctest::Approx(m.current).epsilon(1e-12));
  }
  CHECK_THROWS_AS(build_filaments(g, Section::with_slit, 0.2, 1), DomainError);
}

TEST_CASE("current crowds at the strip edges") {
  const FilamentSet set = build_filaments(WaveguideGeometry{}, Section::without_slit, 1.0, 100);
  // Signal strip is strips[1]; compare edge and centre current densities.
  double edge = 0.0, centre = 0.0;
  for (const auto& f : set.filaments) {
    if (f.strip != 1) continue;
    const double density = f.current / f.width();
    if (std::abs(f.position()) < 5.0) centre = density;
    if (f.right == doctest::Approx(50.0)) edge = density;
  }
  CHECK(edge > 3.0 * centre);
  CHECK(centre > 0.0);
}

}
