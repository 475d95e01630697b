#include "slitcpw/spinphys.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "slitcpw/fitting.hpp"

namespace slitcpw {

namespace {

const SpinOperators<double>& spin_ops() {
  static const SpinOperators<double> ops;
  return ops;
}

void add_noise(std::vector<double>& values, const Noise& noise) {
  if (noise.sigma == 0.0) return;
  if (!(noise.sigma > 0.0)) throw DomainError("noise sigma must be >= 0");
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, noise.sigma);
  for (double& v : values) v += gauss(rng);
}

template <typename Range>
void require_increasing(const Range& values, const char* what) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw DomainError(std::string(what) + " must be strictly increasing");
    }
  }
}

}  // namespace

void check(const SpinParams& params) {
  if (!(params.zero_field_splitting_d > 0.0)) throw DomainError("zero_field_splitting_d must be > 0");
  if (!(params.g_factor > 0.0)) throw DomainError("g_factor must be > 0");
  if (!(params.bohr_mhz_per_gauss > 0.0)) throw DomainError("bohr_mhz_per_gauss must be > 0");
}

void check(const StaticField& field) {
  if (!(field.b0 >= 0.0) || !std::isfinite(field.b0)) throw DomainError("b0 must be finite and >= 0");
  if (std::abs(field.orientation.norm() - 1.0) > 1e-12) {
    throw DomainError("static field orientation must be a unit vector");
  }
}

void check(const OdmrSpectrum& spectrum) {
  if (spectrum.frequencies.size() != spectrum.contrast.size()) {
    throw DomainError("spectrum columns differ in length");
  }
  require_increasing(spectrum.frequencies, "ODMR frequency grid");
  for (double c : spectrum.contrast) {
    if (!std::isfinite(c)) throw DomainError("ODMR contrast must be finite");
  }
}

void check(const RabiTrace& trace) {
  if (trace.durations.size() != trace.contrast.size()) {
    throw DomainError("trace columns differ in length");
  }
  require_increasing(trace.durations, "Rabi duration grid");
  if (!trace.durations.empty() && trace.durations.front() < 0.0) {
    throw DomainError("Rabi durations must start at >= 0");
  }
}

SpinMatrix hamiltonian(const SpinParams& params, const StaticField& field) {
  check(params);
  check(field);
  const auto& s = spin_ops();
  const double spin = SpinParams::spin;
  SpinMatrix h = params.zero_field_splitting_d *
                 (s.z * s.z - SpinMatrix::Identity() * (spin * (spin + 1.0) / 3.0));
  const Eigen::Vector3d b = params.gyromagnetic() * field.b0 * field.orientation;
  h += b.x() * s.x + b.y() * s.y + b.z() * s.z;
  return h;
}

SpinSpectrum transition_frequencies(const SpinParams& params, const StaticField& field) {
  const SpinMatrix h = hamiltonian(params, field);
  const Eigen::SelfAdjointEigenSolver<SpinMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("spin Hamiltonian eigensolve failed");

  SpinSpectrum out;
  out.hermiticity_residual = (h - h.adjoint()).norm();
  const auto& vectors = solver.eigenvectors();
  const auto& s = spin_ops();
  for (int i = 0; i < 4; ++i) {
    out.eigenvalues[i] = solver.eigenvalues()(i);
    out.sz_expectation[i] = (vectors.col(i).adjoint() * s.z * vectors.col(i))(0, 0).real();
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double element = std::abs((vectors.col(i).adjoint() * s.x * vectors.col(j))(0, 0));
      out.transitions.push_back({i, j, out.eigenvalues[j] - out.eigenvalues[i], element});
    }
  }

  std::array<int, 4> by_sz{0, 1, 2, 3};
  std::stable_sort(by_sz.begin(), by_sz.end(),
                   [&](int a, int b) { return out.sz_expectation[a] > out.sz_expectation[b]; });
  auto index_of = [&](int a, int b) {
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    const auto it = std::find_if(out.transitions.begin(), out.transitions.end(),
                                 [&](const Transition& t) { return t.lower == lo && t.upper == hi; });
    return static_cast<int>(it - out.transitions.begin());
  };
  out.f_plus_transition = index_of(by_sz[0], by_sz[1]);
  out.f_minus_transition = index_of(by_sz[2], by_sz[3]);
  return out;
}

double f_plus(const SpinParams& params, double b0) {
  if (!(b0 >= 0.0)) throw DomainError("b0 must be >= 0");
  return 2.0 * params.zero_field_splitting_d + params.gyromagnetic() * b0;
}

double f_minus(const SpinParams& params, double b0) {
  if (!(b0 >= 0.0)) throw DomainError("b0 must be >= 0");
  return std::abs(2.0 * params.zero_field_splitting_d - params.gyromagnetic() * b0);
}

double rabi_frequency(const SpinParams& params, double b_ac_x) {
  if (!(b_ac_x >= 0.0)) throw DomainError("microwave field amplitude must be >= 0");
  return std::sqrt(3.0) * params.gyromagnetic() * b_ac_x;
}

OdmrSpectrum synthesize_odmr(const SpinParams& params, const StaticField& field,
                             const OdmrLines& lines, const std::vector<double>& frequencies,
                             const Noise& noise) {
  const SpinSpectrum spectrum = transition_frequencies(params, field);
  OdmrSpectrum out{frequencies, std::vector<double>(frequencies.size(), 0.0)};
  check(out);
  const std::array<std::pair<const OdmrLine*, double>, 2> peaks{{
      {&lines.f_minus, spectrum.f_minus()},
      {&lines.f_plus, spectrum.f_plus()},
  }};
  for (const auto& [line, centre] : peaks) {
    if (line->amplitude == 0.0) continue;
    if (!(line->gaussian_sigma > 0.0) || !(line->lorentzian_gamma > 0.0)) {
      throw DomainError("ODMR line widths must be > 0");
    }
    const double peak = voigt(0.0, line->gaussian_sigma, line->lorentzian_gamma);
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
      out.contrast[i] += line->amplitude *
                         voigt(frequencies[i] - centre, line->gaussian_sigma, line->lorentzian_gamma) /
                         peak;
    }
  }
  add_noise(out.contrast, noise);
  return out;
}

double rabi_contrast(double a_rabi, double f_rabi, double t2_star, double t) {
  return -a_rabi * std::cos(2.0 * M_PI * f_rabi * t) * std::exp(-t / t2_star);
}

RabiTrace synthesize_rabi(double a_rabi, double f_rabi, double t2_star,
                          const std::vector<double>& durations, const Noise& noise) {
  if (!(t2_star > 0.0)) throw DomainError("t2_star must be > 0");
  if (!(f_rabi >= 0.0)) throw DomainError("f_rabi must be >= 0");
  RabiTrace trace{durations, {}};
  for (double t : durations) trace.contrast.push_back(rabi_contrast(a_rabi, f_rabi, t2_star, t));
  check(trace);
  add_noise(trace.contrast, noise);
  return trace;
}

std::vector<double> linear_grid(double begin, double end, double step) {
  if (!(step > 0.0) || end < begin) throw DomainError("invalid grid range");
  const auto n = static_cast<int>(std::floor((end - begin) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = begin + i * step;
  return out;
}

}  // namespace slitcpw
