// slitcpw: command-line front end for the slit-loaded CPW toolkit.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slitcpw/analysis.hpp"
#include "slitcpw/emfield.hpp"
#include "slitcpw/fitting.hpp"
#include "slitcpw/geometry.hpp"
#include "slitcpw/io.hpp"
#include "slitcpw/reproduce.hpp"
#include "slitcpw/spinphys.hpp"

namespace fs = std::filesystem;
using namespace slitcpw;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDomain = 2, kNumerical = 3 };

struct Common {
  std::string geometry_path;
  double power_w = 1.0;
  double freq_mhz = 70.0;
  std::string out_dir;
  std::uint64_t seed = 0;

  WaveguideGeometry geometry() const {
    return geometry_path.empty() ? WaveguideGeometry{} : validate(load_geometry(geometry_path));
  }
  DriveConditions drive() const {
    DriveConditions d;
    d.input_power = power_w;
    d.frequency = freq_mhz * 1e6;
    for (const auto& w : drive_warnings(d)) std::cerr << "warning: " << w << "\n";
    return d;
  }
};

// Writes to <out>/<name> when --out is given, otherwise to stdout.
void emit(const Common& c, const std::string& name, const std::string& text) {
  if (c.out_dir.empty()) {
    std::cout << text;
  } else {
    write_text_file(fs::path(c.out_dir) / name, text);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("bad number in list: '" + item + "'");
    }
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

std::string csv_of(const std::vector<FieldSample>& samples) {
  std::ostringstream os;
  write_field_csv(os, samples);
  return os.str();
}

// --- commands -------------------------------------------------------------

int run_impedance(const Common& c) {
  const WaveguideGeometry g = c.geometry();
  const double z0 = cpw_impedance(g);
  json j;
  j["z0_ohm"] = z0;
  j["eps_eff"] = cpw_effective_permittivity(g);
  j["reflection_vs_50ohm_dB"] = reflection_estimate(z0, 50.0);
  emit(c, "impedance.json", j.dump(2) + "\n");
  return kOk;
}

int run_field_map(const Common& c, const std::string& section_text, const std::string& grid_text, bool verify) {
  const WaveguideGeometry g = c.geometry();
  const Section section = parse_section(section_text);
  const FilamentSet filaments = driven_filaments(g, c.drive(), section);
  const FieldMap map = field_map(filaments, parse_grid(grid_text));
  emit(c, "field_map.csv", csv_of(map.samples));
  if (verify) {
    double worst = 0.0;
    for (const auto& s : map.samples) {
      const auto mirrored = b_field_at(filaments, -s.position.x(), s.position.z());
      worst = std::max({worst, std::abs(mirrored.x() - s.b.x()), std::abs(mirrored.y() + s.b.z())});
    }
    if (worst > 1e-10) {
      throw NumericalError("symmetry check failed: max deviation " + format_number(worst) + " G");
    }
    std::cerr << "symmetry ok: max deviation " << format_number(worst) << " G\n";
  }
  return kOk;
}

int run_depth_sweep(const Common& c, const std::string& widths_text, double z_step) {
  const WaveguideGeometry g = c.geometry();
  const auto sweep = depth_sweep(g, c.drive(), parse_list(widths_text), 0.5, g.substrate_thickness, z_step);
  json summary;
  summary["signal_width_um"] = g.signal_width;
  json entries = json::array();
  for (const auto& e : sweep) {
    std::ostringstream os;
    write_depth_csv(os, e.profile);
    emit(c, "depth_slit_" + format_number(e.slit_width) + "um.csv", os.str());
    bool monotone = true;
    for (std::size_t i = 1; i < e.profile.bx_values.size(); ++i) {
      monotone = monotone && e.profile.bx_values[i] < e.profile.bx_values[i - 1];
    }
    entries.push_back({{"slit_width_um", e.slit_width},
                       {"argmax_depth_um", e.profile.argmax_depth},
                       {"max_bx_G", e.profile.max_bx},
                       {"interior_maximum", e.profile.interior_maximum},
                       {"monotone_decreasing", monotone}});
  }
  summary["profiles"] = entries;
  emit(c, "depth_summary.json", summary.dump(2) + "\n");
  return kOk;
}

struct OdmrArgs {
  bool synth = false;
  std::string fit_path;
  bool estimate_b0 = false;
  double b0_g = 97.0;
  std::string range = "150,400,0.5";
  double noise = 0.0;
  int peaks = 2;
};

int run_odmr(const Common& c, const OdmrArgs& a) {
  const SpinParams spin;
  if (a.synth == !a.fit_path.empty()) throw CLI::ValidationError("odmr: give exactly one of --synth or --fit <csv>");
  if (a.synth) {
    const auto r = parse_list(a.range);
    if (r.size() != 3) throw DomainError("--range expects lo,hi,step");
    const OdmrLines lines;
    const auto spectrum = synthesize_odmr(spin, StaticField::axial(a.b0_g), lines, linear_grid(r[0], r[1], r[2]),
                                          {a.noise * lines.f_plus.amplitude, c.seed});
    emit(c, "odmr.csv", format_two_column_csv("freq_MHz", "contrast", spectrum.frequencies, spectrum.contrast));
    return kOk;
  }
  const Columns cols = read_two_column_csv(a.fit_path, "freq_MHz", "contrast");
  const FitResult fit = fit_odmr({cols.a, cols.b}, a.peaks);
  json j = json::parse(fit_result_json(fit));
  if (a.estimate_b0) {
    const auto peaks = odmr_peaks(fit);
    if (peaks.size() != 2) throw DomainError("--estimate-b0 needs a two-peak fit");
    const auto inv = b0_and_d_from_resonances(spin, peaks[1].center, peaks[0].center, DInterval{});
    json candidates = json::array();
    for (const auto& [name, b] : {std::pair{"low_field", inv.low_field}, std::pair{"high_field", inv.high_field}}) {
      candidates.push_back({{"branch", name}, {"b0_G", b.b0}, {"d_MHz", b.d}, {"plausible", b.plausible.value_or(false)}});
    }
    j["b0_candidates"] = candidates;
  }
  emit(c, "odmr_fit.json", j.dump(2) + "\n");
  return kOk;
}

struct RabiArgs {
  bool synth = false;
  std::string fit_path;
  bool to_field = false;
  std::optional<double> f_rabi_mhz;
  std::optional<double> b_ac_g;
  double a_rabi = 0.01;
  double t2_star_us = 1.0;
  std::string range = "0,2,0.002";
  double noise = 0.0;
};

int run_rabi(const Common& c, const RabiArgs& a) {
  const SpinParams spin;
  if (a.synth) {
    if (!a.fit_path.empty()) throw CLI::ValidationError("rabi: --synth and --fit are exclusive");
    if (a.f_rabi_mhz.has_value() == a.b_ac_g.has_value()) {
      throw CLI::ValidationError("rabi --synth: give exactly one of --f-rabi-mhz or --b-ac-g");
    }
    const double f = a.f_rabi_mhz ? *a.f_rabi_mhz : rabi_frequency(spin, *a.b_ac_g);
    const auto r = parse_list(a.range);
    if (r.size() != 3) throw DomainError("--range expects lo,hi,step");
    const auto trace = synthesize_rabi(a.a_rabi, f, a.t2_star_us, linear_grid(r[0], r[1], r[2]),
                                       {a.noise * a.a_rabi, c.seed});
    emit(c, "rabi.csv", format_two_column_csv("t_us", "contrast", trace.durations, trace.contrast));
    return kOk;
  }
  if (!a.fit_path.empty()) {
    const Columns cols = read_two_column_csv(a.fit_path, "t_us", "contrast");
    const FitResult fit = fit_rabi({cols.a, cols.b});
    json j = json::parse(fit_result_json(fit));
    if (a.to_field) j["b_ac_x_G"] = rabi_to_field(spin, fit.value("f_rabi_MHz"));
    emit(c, "rabi_fit.json", j.dump(2) + "\n");
    return kOk;
  }
  if (a.to_field && a.f_rabi_mhz) {
    std::cout << format_number(rabi_to_field(spin, *a.f_rabi_mhz)) << "\n";
    return kOk;
  }
  throw CLI::ValidationError("rabi: give --synth, --fit <csv>, or --to-field with --f-rabi-mhz");
}

int run_compare(const Common& c, const std::string& measured_path, const std::string& simulated_path, bool normalize) {
  auto load = [](const std::string& path) {
    const Columns cols = read_two_column_csv(path, "x_um", "value");
    return FieldProfile{cols.a, cols.b, std::nullopt, {}};
  };
  FieldProfile measured = load(measured_path), simulated = load(simulated_path);
  if (normalize) {
    measured = normalize_profile(measured);
    simulated = normalize_profile(simulated);
  }
  emit(c, "comparison.json", comparison_json(compare_profiles(measured, simulated)));
  return kOk;
}

int run_reproduce(const Common& c) {
  const auto checks = reproduce_paper(c.seed);
  emit(c, "reproduce.txt", format_check_table(checks));
  for (const auto& r : checks) {
    if (!r.passed) return kNumerical;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slit-loaded coplanar waveguide field, spin and fitting toolkit"};
  app.require_subcommand(1);

  Common c;
  auto add_common = [&](CLI::App* sub, bool drive) {
    sub->add_option("--geometry", c.geometry_path, "key=value geometry file (defaults built in)");
    if (drive) {
      sub->add_option("--power-w", c.power_w, "input power, W")->check(CLI::PositiveNumber);
      sub->add_option("--freq-mhz", c.freq_mhz, "drive frequency, MHz")->check(CLI::PositiveNumber);
    }
    sub->add_option("--out", c.out_dir, "output directory (stdout when omitted)");
  };

  auto* impedance = app.add_subcommand("impedance", "characteristic impedance and reflection vs 50 ohm");
  add_common(impedance, false);

  auto* fmap = app.add_subcommand("field-map", "B field on an x-z grid");
  add_common(fmap, true);
  std::string section = "with-slit";
  std::string grid = "-200,200,2,1,100,1";
  bool verify = false;
  fmap->add_option("--section", section, "with-slit|without-slit");
  fmap->add_option("--grid", grid, "x0,x1,dx,z0,z1,dz in um");
  fmap->add_flag("--verify", verify, "check Bx even and Bz odd in x");

  auto* dsweep = app.add_subcommand("depth-sweep", "Bx(z) at x = 0 for several slit widths");
  add_common(dsweep, true);
  std::string widths = "10,20,40,80";
  double z_step = 0.5;
  dsweep->add_option("--slit-widths", widths, "comma-separated widths in um, 0 = no slit");
  dsweep->add_option("--z-step-um", z_step, "depth sampling step")->check(CLI::PositiveNumber);

  auto* odmr = app.add_subcommand("odmr", "synthesize or fit CW-ODMR spectra");
  add_common(odmr, false);
  OdmrArgs oa;
  odmr->add_flag("--synth", oa.synth, "write a synthetic spectrum");
  odmr->add_option("--fit", oa.fit_path, "fit a freq_MHz,contrast CSV");
  odmr->add_flag("--estimate-b0", oa.estimate_b0, "append (B0, D) candidates to the fit");
  odmr->add_option("--b0-g", oa.b0_g, "axial static field for --synth, G");
  odmr->add_option("--range", oa.range, "lo,hi,step in MHz");
  odmr->add_option("--noise", oa.noise, "noise sigma relative to the line amplitude");
  odmr->add_option("--peaks", oa.peaks, "number of Voigt peaks to fit")->check(CLI::Range(1, 4));
  odmr->add_option("--seed", c.seed, "noise seed");

  auto* rabi = app.add_subcommand("rabi", "synthesize or fit Rabi traces");
  add_common(rabi, false);
  RabiArgs ra;
  rabi->add_flag("--synth", ra.synth, "write a synthetic trace");
  rabi->add_option("--fit", ra.fit_path, "fit a t_us,contrast CSV");
  rabi->add_flag("--to-field", ra.to_field, "convert the Rabi frequency to B_AC,x");
  rabi->add_option("--f-rabi-mhz", ra.f_rabi_mhz, "Rabi frequency, MHz");
  rabi->add_option("--b-ac-g", ra.b_ac_g, "in-plane microwave field for --synth, G");
  rabi->add_option("--a-rabi", ra.a_rabi, "contrast amplitude");
  rabi->add_option("--t2-star-us", ra.t2_star_us, "decay time, us");
  rabi->add_option("--range", ra.range, "t0,t1,step in us");
  rabi->add_option("--noise", ra.noise, "noise sigma relative to the amplitude");
  rabi->add_option("--seed", c.seed, "noise seed");

  auto* compare = app.add_subcommand("compare", "compare measured and simulated x_um,value profiles");
  add_common(compare, false);
  std::string measured, simulated;
  bool normalize = false;
  compare->add_option("--measured", measured, "measured profile CSV")->required();
  compare->add_option("--simulated", simulated, "simulated profile CSV")->required();
  compare->add_flag("--normalize", normalize, "divide both profiles by their x = 0 value first");

  auto* repro = app.add_subcommand("reproduce-paper", "run the reference pipelines and print a pass/fail table");
  repro->add_option("--seed", c.seed, "noise seed");
  repro->add_option("--out", c.out_dir, "output directory (stdout when omitted)");

  try {
    app.parse(argc, argv);
    if (*impedance) return run_impedance(c);
    if (*fmap) return run_field_map(c, section, grid, verify);
    if (*dsweep) return run_depth_sweep(c, widths, z_step);
    if (*odmr) return run_odmr(c, oa);
    if (*rabi) return run_rabi(c, ra);
    if (*compare) return run_compare(c, measured, simulated, normalize);
    if (*repro) return run_reproduce(c);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidGeometry& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
