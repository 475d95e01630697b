#include "slitcpw/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "slitcpw/io.hpp"

namespace slitcpw {

namespace {

std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4g", v);
  return buffer;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

}  // namespace

FieldProfile simulated_profile(const FilamentSet& filaments, const std::vector<double>& positions, double z) {
  FieldProfile profile;
  profile.positions = positions;
  for (double x : positions) profile.values.push_back(b_field_at(filaments, x, z).x());
  return profile;
}

FieldProfile rabi_derived_profile(const FilamentSet& filaments, const SpinParams& spin,
                                  const std::vector<double>& positions, double z,
                                  const RabiMeasurement& measurement) {
  const auto durations = linear_grid(0.0, measurement.duration, measurement.step);
  FieldProfile profile;
  profile.positions = positions;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double bx = std::abs(b_field_at(filaments, positions[i], z).x());
    Noise noise = measurement.noise;
    noise.seed += i;
    const RabiTrace trace = synthesize_rabi(measurement.a_rabi, rabi_frequency(spin, bx),
                                            measurement.t2_star, durations, noise);
    const FitResult fit = fit_rabi(trace);
    profile.values.push_back(rabi_to_field(spin, fit.value("f_rabi_MHz")));
  }
  return profile;
}

std::vector<DepthSweepEntry> depth_sweep(const WaveguideGeometry& geometry, const DriveConditions& drive,
                                         const std::vector<double>& slit_widths, double z_begin,
                                         double z_end, double z_step) {
  std::vector<DepthSweepEntry> out;
  for (double w : slit_widths) {
    WaveguideGeometry g = geometry;
    g.slit_width = w;
    const Section section = w > 0.0 ? Section::with_slit : Section::without_slit;
    out.push_back({w, depth_profile(g, drive, section, z_begin, std::min(z_end, g.substrate_thickness), z_step)});
  }
  return out;
}

std::vector<CheckResult> reproduce_paper(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  const WaveguideGeometry device;
  const DriveConditions drive;
  const SpinParams spin;

  {
    const double a = f_plus(spin, 97.0), b = f_plus(spin, 129.0), c = f_plus(spin, 176.0);
    const bool ok = within(a, 339.5, 343.5) && within(b, 429.0, 433.0) && within(c, 561.0, 565.0);
    checks.push_back({"resonances", "f+ at 97/129/176 G near 341/431/563 MHz", ok,
                      fmt(a) + ", " + fmt(b) + ", " + fmt(c) + " MHz"});
  }
  {
    const double z0 = cpw_impedance(device);
    checks.push_back({"impedance", "Z0 within 50 +/- 3.5 ohm", within(z0, 46.5, 53.5),
                      fmt(z0) + " ohm, reflection " + fmt(reflection_estimate(z0, 50.0)) + " dB"});
  }

  const FilamentSet slit = driven_filaments(device, drive, Section::with_slit);
  {
    const auto scan = line_scan(slit, {-18.0, 18.0, 0.5, 8.1});
    bool ok = true;
    double min_bx = 1e300;
    for (const auto& s : scan) {
      min_bx = std::min(min_bx, s.b.x());
      ok = ok && s.b.x() >= 1.5 && std::abs(s.b.x()) > std::abs(s.b.z());
    }
    const auto gap = line_scan(slit, {52.0, 88.0, 0.5, 8.1});
    bool crosses = false;
    for (std::size_t i = 1; i < gap.size(); ++i) crosses = crosses || (gap[i - 1].b.x() * gap[i].b.x() <= 0.0);
    checks.push_back({"in-slit field", "Bx >= 1.5 G and |Bx| > |Bz| in the slit at z = 8.1 um; Bx crosses 0 in the gap",
                      ok && crosses, "min Bx " + fmt(min_bx) + " G"});
  }
  {
    const auto sweep = depth_sweep(device, drive, {0.0, 10.0, 20.0, 40.0, 80.0});
    const auto& ref = sweep[3].profile;
    const bool peak_ok = ref.interior_maximum && within(ref.argmax_depth, 15.0, 40.0) && within(ref.max_bx, 2.0, 5.0);
    const auto& none = sweep[0].profile;
    bool monotone = !none.interior_maximum;
    for (std::size_t i = 1; i < none.bx_values.size(); ++i) monotone = monotone && none.bx_values[i] < none.bx_values[i - 1];
    checks.push_back({"depth profile", "slit 40 um: interior max 2-5 G at 15-40 um; no slit: monotone",
                      peak_ok && monotone, "max " + fmt(ref.max_bx) + " G at " + fmt(ref.argmax_depth) + " um"});
    bool trend = true;
    for (std::size_t i = 2; i < sweep.size(); ++i) {
      trend = trend && sweep[i].profile.max_bx < sweep[i - 1].profile.max_bx &&
              sweep[i].profile.argmax_depth > sweep[i - 1].profile.argmax_depth;
    }
    checks.push_back({"slit-width trend", "wider slit: lower and deeper maximum", trend, ""});

    WaveguideGeometry wide = device;
    wide.signal_width = 1000.0;
    const auto wide_profile = depth_sweep(wide, drive, {40.0})[0].profile;
    const bool ok = wide_profile.max_bx <= ref.max_bx / 5.0 && wide_profile.argmax_depth > ref.argmax_depth;
    checks.push_back({"signal-width trend", "1 mm signal line: maximum >= 5x weaker and deeper", ok,
                      "max " + fmt(wide_profile.max_bx) + " G at " + fmt(wide_profile.argmax_depth) + " um"});
  }
  {
    RabiMeasurement measurement;
    measurement.noise.seed = seed;
    const auto measured = normalize_profile(rabi_derived_profile(slit, spin, {-16.0, 0.0}, 8.1, measurement));
    const auto simulated = normalize_profile(simulated_profile(slit, linear_grid(-20.0, 20.0, 0.5), 8.1));
    const auto cmp = compare_profiles(measured, simulated);
    const auto shallow = normalize_profile(simulated_profile(slit, {-16.0, -8.0, 0.0, 8.0, 16.0}, 1.7));
    const bool edge = shallow.values.front() > 1.0 && shallow.values.back() > 1.0;
    checks.push_back({"rabi profile",
                      "Rabi-derived normalized field at x = -16 um matches simulation (rms < 0.05); edge > centre at 1.7 um",
                      cmp.rms_deviation < 0.05 && edge, "rms " + fmt(cmp.rms_deviation)});
  }
  {
    const auto grid = linear_grid(150.0, 400.0, 1.0);
    const OdmrLines lines;
    const StaticField field = StaticField::axial(97.0);
    const auto spectrum = synthesize_odmr(spin, field, lines, grid, {0.1 * lines.f_plus.amplitude, seed});
    const auto fit = fit_odmr(spectrum, 2);
    const auto peaks = odmr_peaks(fit);
    const double fm = f_minus(spin, 97.0), fp = f_plus(spin, 97.0);
    const bool ok = std::abs(peaks[0].center - fm) < 0.01 * fm && std::abs(peaks[1].center - fp) < 0.01 * fp;
    const auto inversion = b0_and_d_from_resonances(spin, peaks[1].center, peaks[0].center, DInterval{});
    checks.push_back({"odmr fit", "double-Voigt fit of a noisy 97 G spectrum recovers both lines within 1%",
                      ok, "B0 " + fmt(inversion.high_field.b0) + " G, D " + fmt(inversion.high_field.d) + " MHz"});
  }
  return checks;
}

std::string format_check_table(const std::vector<CheckResult>& checks) {
  std::string out;
  for (const auto& c : checks) {
    out += std::string(c.passed ? "PASS" : "FAIL") + "  " + c.id + ": " + c.description;
    if (!c.detail.empty()) out += " [" + c.detail + "]";
    out += "\n";
  }
  return out;
}

}  // namespace slitcpw
