// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <Eigen/Geometry>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "slitcpw/analysis.hpp"
#include "slitcpw/emfield.hpp"
#include "slitcpw/fitting.hpp"
#include "slitcpw/reproduce.hpp"
#include "slitcpw/spinphys.hpp"

using namespace slitcpw;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, pattern, a, b, c);
  return buffer;
}

bool in(double v, double lo, double hi) { return v >= lo && v <= hi; }

const SpinParams kSpin;
const WaveguideGeometry kDevice;
const DriveConditions kDrive;

Outcome resonances() {
  const double a = f_plus(kSpin, 97.0), b = f_plus(kSpin, 129.0), c = f_plus(kSpin, 176.0);
  const double fp = 340.76;
  const double b0 = b0_and_d_from_resonances(kSpin, fp, fp - 4.0 * kSpin.zero_field_splitting_d).high_field.b0;
  return {in(a, 339.5, 343.5) && in(b, 429, 433) && in(c, 561, 565) && in(b0, 96, 98),
          fmt("f+ = %.2f/%.2f/%.2f MHz", a, b, c) + fmt(", 340.76 MHz -> %.3f G", b0)};
}

Outcome oracle() {
  double worst = 0.0;
  double element = 0.0;
  for (int b = 0; b <= 500; ++b) {
    const auto s = transition_frequencies(kSpin, StaticField::axial(b));
    worst = std::max({worst, std::abs(s.f_plus() - f_plus(kSpin, b)), std::abs(s.f_minus() - f_minus(kSpin, b))});
  }
  const SpinOperators<> ops;
  element = std::abs(ops.x(0, 1));
  const double err = std::abs(element - std::sqrt(3.0) / 2);
  return {worst < 1e-3 && err < 1e-12, fmt("max |diag - closed form| = %.3g MHz, |<3/2|Sx|1/2>| error %.2g", worst, err)};
}

Outcome symmetry_zeros(const FilamentSet& set) {
  double worst_bz = 0.0;
  for (double z : {0.1, 1.7, 8.1, 26.0, 100.0, 299.0}) worst_bz = std::max(worst_bz, std::abs(b_field_at(set, 0.0, z).y()));
  const double bx0 = std::abs(b_field_at(set, 0.0, 0.0).x());
  return {bx0 < 1e-10 && worst_bz < 1e-10, fmt("|Bx(0,0,0)| = %.2g G, max |Bz(0,z)| = %.2g G", bx0, worst_bz)};
}

Outcome depth_reproduction(const std::vector<DepthSweepEntry>& sweep) {
  const auto& slit = sweep[3].profile;  // 40 um
  const auto& plain = sweep[0].profile;
  bool monotone = !plain.interior_maximum;
  for (std::size_t i = 1; i < plain.bx_values.size(); ++i) monotone = monotone && plain.bx_values[i] < plain.bx_values[i - 1];
  return {slit.interior_maximum && in(slit.argmax_depth, 15, 40) && in(slit.max_bx, 2, 5) && monotone,
          fmt("z* = %.2f um, peak %.3f G, no-slit monotone %g", slit.argmax_depth, slit.max_bx, monotone)};
}

Outcome slit_trend(const std::vector<DepthSweepEntry>& sweep) {
  bool ok = true;
  std::string detail;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    const auto& p = sweep[i].profile;
    detail += fmt("%g um: %.3f G @ %.1f um; ", sweep[i].slit_width, p.max_bx, p.argmax_depth);
    if (i > 1) ok = ok && p.max_bx < sweep[i - 1].profile.max_bx && p.argmax_depth > sweep[i - 1].profile.argmax_depth;
  }
  return {ok, detail};
}

Outcome signal_trend(const std::vector<DepthSweepEntry>& sweep) {
  WaveguideGeometry wide = kDevice;
  wide.signal_width = 1000.0;
  const auto w = depth_sweep(wide, kDrive, {40.0})[0].profile;
  const auto& ref = sweep[3].profile;
  return {w.max_bx <= ref.max_bx / 5.0 && w.argmax_depth > ref.argmax_depth,
          fmt("1 mm: %.3f G @ %.1f um (ratio %.1f)", w.max_bx, w.argmax_depth, ref.max_bx / w.max_bx)};
}

Outcome in_slit_floor(const FilamentSet& set) {
  double min_bx = 1e300, min_margin = 1e300;
  for (const auto& s : line_scan(set, {-18.0, 18.0, 0.25, 8.1})) {
    min_bx = std::min(min_bx, s.b.x());
    min_margin = std::min(min_margin, std::abs(s.b.x()) - std::abs(s.b.z()));
  }
  double crossing = NAN;
  const auto gap = line_scan(set, {50.0, 90.0, 0.25, 8.1});
  for (std::size_t i = 1; i < gap.size(); ++i) {
    if (gap[i - 1].b.x() * gap[i].b.x() <= 0.0) {
      crossing = gap[i].position.x();
      break;
    }
  }
  return {min_bx >= 1.5 && min_margin > 0.0 && !std::isnan(crossing),
          fmt("min Bx %.3f G, min |Bx|-|Bz| %.3f G, gap zero near x = %.2f um", min_bx, min_margin, crossing)};
}

Outcome impedance() {
  const double z0 = cpw_impedance(kDevice);
  return {in(z0, 46.5, 53.5), fmt("Z0 = %.2f ohm", z0)};
}

Outcome fit_round_trips() {
  // Noiseless: every generating parameter within 0.1%.
  const OdmrLines lines;
  const auto grid = linear_grid(150.0, 400.0, 0.5);
  const auto odmr = fit_odmr(synthesize_odmr(kSpin, StaticField::axial(97.0), lines, grid), 2);
  const auto peaks = odmr_peaks(odmr);
  const double centres[2] = {f_minus(kSpin, 97.0), f_plus(kSpin, 97.0)};
  double worst = 0.0;
  auto rel = [&](double got, double want) { worst = std::max(worst, std::abs(got - want) / std::abs(want)); };
  for (int k = 0; k < 2; ++k) {
    rel(peaks[k].center, centres[k]);
    rel(peaks[k].amplitude, lines.f_plus.amplitude);
    rel(peaks[k].gaussian_sigma, lines.f_plus.gaussian_sigma);
    rel(peaks[k].lorentzian_gamma, lines.f_plus.lorentzian_gamma);
  }
  const auto t = linear_grid(0.0, 2.0, 0.004);
  const auto rabi = fit_rabi(synthesize_rabi(0.01, 14.0, 1.0, t));
  rel(rabi.value("a_rabi"), 0.01);
  rel(rabi.value("f_rabi_MHz"), 14.0);
  rel(rabi.value("t2_star_us"), 1.0);

  // Seeded 10% noise, 100 trials each.
  int odmr_ok = 0, rabi_ok = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    try {
      const auto p = odmr_peaks(fit_odmr(
          synthesize_odmr(kSpin, StaticField::axial(97.0), lines, grid, {0.1 * lines.f_plus.amplitude, seed}), 2));
      odmr_ok += std::abs(p[0].center - centres[0]) < 0.01 * centres[0] &&
                 std::abs(p[1].center - centres[1]) < 0.01 * centres[1];
    } catch (const Error&) {
    }
    try {
      const auto r = fit_rabi(synthesize_rabi(0.01, 14.0, 1.0, t, {0.1 * 0.01, seed}));
      rabi_ok += std::abs(r.value("f_rabi_MHz") - 14.0) < 0.14;
    } catch (const Error&) {
    }
  }
  return {worst < 1e-3 && odmr_ok >= 95 && rabi_ok >= 95,
          fmt("noiseless max rel err %.2g; noisy ODMR %g/100, Rabi %g/100", worst, odmr_ok, rabi_ok)};
}

Outcome rabi_pipeline(const FilamentSet& set) {
  const auto measured = normalize_profile(rabi_derived_profile(set, kSpin, {-16.0, 0.0}, 8.1));
  const auto simulated = normalize_profile(simulated_profile(set, linear_grid(-20.0, 20.0, 0.5), 8.1));
  const double rms = compare_profiles(measured, simulated).rms_deviation;
  const auto shallow = normalize_profile(simulated_profile(set, {-16.0, -8.0, 0.0, 8.0, 16.0}, 1.7));
  const bool edges = shallow.values.front() > 1.0 && shallow.values.back() > 1.0;
  return {rms < 0.05 && edges, fmt("self-consistency rms %.2g; z = 1.7 um edge/centre %.3f", rms, shallow.values.front())};
}

Outcome properties(const FilamentSet& set) {
  const auto quad = driven_filaments(kDevice, {4.0, 70e6, 50.0}, Section::with_slit);
  double lin = 0.0, sym = 0.0, sup = 0.0;
  for (double z : {1.7, 8.1, 30.0}) {
    for (double x : {0.0, 12.0, 45.0, 70.0, 150.0}) {
      const auto b = b_field_at(set, x, z), m = b_field_at(set, -x, z);
      lin = std::max(lin, (b_field_at(quad, x, z) - 2.0 * b).norm() / b.norm());
      sym = std::max({sym, std::abs(b.x() - m.x()), std::abs(b.y() + m.y())});
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      for (const auto& f : set.filaments) sum += b_field_of(f, x, z);
      sup = std::max(sup, (sum - b).norm());
    }
  }
  FilamentSet signal_only = set;
  signal_only.filaments.clear();
  for (const auto& f : set.filaments) {
    if (set.strips[f.strip].role == StripRole::signal) signal_only.filaments.push_back(f);
  }
  const double r = 10.0 * kDevice.total_width();
  double far = 0.0;
  for (double angle : {0.2, 0.7, 1.2, 1.5707963}) {
    const double x = r * std::cos(angle), z = r * std::sin(angle);
    far = std::max(far, b_field_at(set, x, z).norm() / b_field_at(signal_only, x, z).norm());
  }
  return {lin < 1e-12 && sym < 1e-10 && sup < 1e-12 && far <= 0.05,
          fmt("sqrt(P) err %.2g, symmetry err %.2g G, far-field ratio %.3g", lin, sym, far)};
}

}  // namespace

int main() {
  const FilamentSet slit = driven_filaments(kDevice, kDrive, Section::with_slit);
  const auto sweep = depth_sweep(kDevice, kDrive, {0.0, 10.0, 20.0, 40.0, 80.0});

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"resonance formulas", resonances},
      {"diagonalization oracle", oracle},
      {"symmetry zeros", [&] { return symmetry_zeros(slit); }},
      {"depth profile", [&] { return depth_reproduction(sweep); }},
      {"slit-width trend", [&] { return slit_trend(sweep); }},
      {"signal-width trend", [&] { return signal_trend(sweep); }},
      {"in-slit field floor", [&] { return in_slit_floor(slit); }},
      {"impedance", impedance},
      {"fit round trips", fit_round_trips},
      {"Rabi field pipeline", [&] { return rabi_pipeline(slit); }},
      {"field property suite", [&] { return properties(slit); }},
  };
  int failures = 0;
  int id = 1;
  for (const auto& [name, run] : criteria) {
    Outcome o{false, ""};
    try {
      o = run();
    } catch (const std::exception& e) {
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.passed;
    std::printf("[%s] %2d %s: %s\n", o.passed ? "PASS" : "FAIL", id++, name, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
