#include "slitcpw/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace slitcpw {

namespace {

constexpr int kRationalTerms = 64;
constexpr double kAsymptoticThreshold = 8.0;
constexpr int kContinuedFractionDepth = 40;
const double kInvSqrtPi = 1.0 / std::sqrt(M_PI);

// Coefficients of Weideman's rational approximation to w(z) in the upper
// half plane, obtained from a discrete Fourier transform of
// (L^2 + t^2) exp(-t^2) sampled at t = L tan(theta / 2).
struct RationalFaddeeva {
  double scale;
  std::array<double, kRationalTerms> coefficients;

  RationalFaddeeva() {
    constexpr int n = kRationalTerms;
    constexpr int m = 2 * n;
    constexpr int samples = 2 * m;
    scale = std::sqrt(n / std::sqrt(2.0));
    std::array<double, samples> f{};
    for (int k = -m + 1; k < m; ++k) {
      const double t = scale * std::tan(k * M_PI / (2.0 * m));
      // f[0] corresponds to k = -m (the point at infinity); shift by m so
      // index 0 of the shifted array is k = 0.
      const int shifted = ((k + m) + m) % samples;
      f[shifted] = std::exp(-t * t) * (scale * scale + t * t);
    }
    f[m] = 0.0;
    for (int j = 1; j <= n; ++j) {
      double re = 0.0;
      for (int i = 0; i < samples; ++i) re += f[i] * std::cos(2.0 * M_PI * j * i / samples);
      coefficients[j - 1] = re / samples;
    }
  }

  std::complex<double> operator()(std::complex<double> z) const {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> denom = scale - i * z;
    const std::complex<double> ratio = (scale + i * z) / denom;
    std::complex<double> poly = 0.0;
    for (int j = kRationalTerms - 1; j >= 0; --j) poly = poly * ratio + coefficients[j];
    return 2.0 * poly / (denom * denom) + kInvSqrtPi / denom;
  }
};

std::complex<double> continued_fraction(std::complex<double> z) {
  std::complex<double> tail = 0.0;
  for (int k = kContinuedFractionDepth; k >= 1; --k) tail = (0.5 * k) / (z - tail);
  return std::complex<double>(0.0, kInvSqrtPi) / (z - tail);
}

Eigen::VectorXd project(const Eigen::VectorXd& p, const Bounds& bounds) {
  return p.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
}

double median(std::vector<double> values) {
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  double m = *mid;
  if (values.size() % 2 == 0) m = 0.5 * (m + *std::max_element(values.begin(), mid));
  return m;
}

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd odmr_model(const Eigen::VectorXd& f, const Eigen::VectorXd& p) {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(f.size(), p(0));
  for (Eigen::Index k = 1; k + 3 < p.size(); k += 4) {
    const double centre = p(k);
    const double amplitude = p(k + 1);
    const double sigma = p(k + 2);
    const double gamma = p(k + 3);
    const double norm = amplitude / voigt(0.0, sigma, gamma);
    for (Eigen::Index i = 0; i < f.size(); ++i) out(i) += norm * voigt(f(i) - centre, sigma, gamma);
  }
  return out;
}

Eigen::VectorXd rabi_model(const Eigen::VectorXd& t, const Eigen::VectorXd& p) {
  Eigen::VectorXd out(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) out(i) = rabi_contrast(p(0), p(1), p(2), t(i));
  return out;
}

}  // namespace

std::complex<double> faddeeva(std::complex<double> z) {
  if (z.imag() < 0.0) return 2.0 * std::exp(-z * z) - faddeeva(-z);
  static const RationalFaddeeva rational;
  if (std::abs(z.real()) + z.imag() > kAsymptoticThreshold) return continued_fraction(z);
  return rational(z);
}

double voigt(double x, double sigma, double gamma) {
  if (!(sigma >= 0.0) || !(gamma >= 0.0) || !(sigma + gamma > 0.0)) {
    throw DomainError("voigt widths must be >= 0 and not both zero");
  }
  if (sigma == 0.0) return gamma / (M_PI * (x * x + gamma * gamma));
  const double s2 = sigma * std::sqrt(2.0);
  if (gamma == 0.0) return std::exp(-(x / s2) * (x / s2)) / (sigma * std::sqrt(2.0 * M_PI));
  return faddeeva({x / s2, gamma / s2}).real() / (sigma * std::sqrt(2.0 * M_PI));
}

Bounds Bounds::unbounded(Eigen::Index n) {
  const double inf = std::numeric_limits<double>::infinity();
  return {Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
}

double FitResult::value(const std::string& name) const {
  const auto it = std::find(parameter_names.begin(), parameter_names.end(), name);
  if (it == parameter_names.end()) throw DomainError("no fit parameter named " + name);
  return parameters(it - parameter_names.begin());
}

double FitResult::standard_error(const std::string& name) const {
  const auto it = std::find(parameter_names.begin(), parameter_names.end(), name);
  if (it == parameter_names.end()) throw DomainError("no fit parameter named " + name);
  return standard_errors(it - parameter_names.begin());
}

FitResult lm_fit(const Model& model, const Eigen::VectorXd& x_in, const Eigen::VectorXd& y_in,
                 const Eigen::VectorXd& initial, const Bounds& bounds, const FitOptions& options) {
  const Eigen::Index n = initial.size();
  const Eigen::Index m = x_in.size();
  if (y_in.size() != m) throw DomainError("x and y differ in length");
  if (m < n) throw DomainError("fewer data points than fit parameters");
  if (bounds.lower.size() != n || bounds.upper.size() != n) throw DomainError("bounds size mismatch");
  if (static_cast<Eigen::Index>(model.parameter_names.size()) != n) {
    throw DomainError("parameter name count mismatch");
  }
  if ((initial.array() < bounds.lower.array()).any() || (initial.array() > bounds.upper.array()).any()) {
    throw DomainError("initial parameters lie outside the bounds");
  }

  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return x_in(a) < x_in(b) || (x_in(a) == x_in(b) && y_in(a) < y_in(b));
  });
  Eigen::VectorXd x(m), y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(i) = x_in(order[i]);
    y(i) = y_in(order[i]);
  }

  auto residual = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd { return y - model.evaluate(x, p); };
  auto jacobian = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd j(m, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double h = std::max(1e-6, 1e-6 * std::abs(p(k)));
      Eigen::VectorXd hi = p, lo = p;
      hi(k) = std::min(p(k) + h, bounds.upper(k));
      lo(k) = std::max(p(k) - h, bounds.lower(k));
      j.col(k) = (model.evaluate(x, hi) - model.evaluate(x, lo)) / (hi(k) - lo(k));
    }
    return j;
  };

  FitResult result;
  result.model = model.name;
  result.parameter_names = model.parameter_names;

  Eigen::VectorXd p = initial;
  Eigen::VectorXd r = residual(p);
  double cost = r.squaredNorm();
  if (!std::isfinite(cost)) throw NumericalError("model is not finite at the initial parameters");
  result.cost_history.push_back(cost);
  Eigen::MatrixXd j = jacobian(p);
  Eigen::MatrixXd normal = j.transpose() * j;
  Eigen::VectorXd gradient = j.transpose() * r;
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(j).rank() < n) {
    throw NumericalError("singular normal equations at the initial parameters");
  }
  double lambda = 1e-3 * normal.diagonal().maxCoeff();

  for (int iteration = 1; iteration <= options.max_iterations; ++iteration) {
    result.iterations = iteration;
    const Eigen::MatrixXd damped = normal + lambda * Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd delta = damped.ldlt().solve(gradient);
    const Eigen::VectorXd candidate = project(p + delta, bounds);
    const Eigen::VectorXd step = candidate - p;
    if (step.norm() <= options.step_tolerance * (1.0 + p.norm())) {
      result.converged = true;
      break;
    }
    const Eigen::VectorXd r_new = residual(candidate);
    const double cost_new = r_new.squaredNorm();
    if (std::isfinite(cost_new) && cost_new < cost) {
      const double relative_decrease = (cost - cost_new) / cost;
      p = candidate;
      r = r_new;
      cost = cost_new;
      result.cost_history.push_back(cost);
      lambda *= 0.3;
      if (relative_decrease < options.cost_tolerance || cost == 0.0) {
        result.converged = true;
        break;
      }
      j = jacobian(p);
      normal = j.transpose() * j;
      gradient = j.transpose() * r;
    } else {
      lambda *= 2.0;
    }
  }

  result.parameters = p;
  result.residual_norm = std::sqrt(cost);
  const double variance = m > n ? cost / static_cast<double>(m - n) : 0.0;
  const Eigen::MatrixXd covariance =
      variance * (normal + lambda * Eigen::MatrixXd::Identity(n, n)).inverse();
  result.standard_errors = covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return result;
}

OdmrInit initial_odmr_guess(const OdmrSpectrum& spectrum, int n_peaks) {
  check(spectrum);
  const auto& f = spectrum.frequencies;
  const auto& c = spectrum.contrast;
  const int n = static_cast<int>(f.size());
  if (n < 3) throw DomainError("ODMR spectrum too short for peak detection");

  OdmrInit init;
  init.baseline = median(c);

  std::vector<double> smooth(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 2);
    const int hi = std::min(n - 1, i + 2);
    smooth[i] = std::accumulate(c.begin() + lo, c.begin() + hi + 1, 0.0) / (hi - lo + 1);
  }

  struct Candidate {
    int index;
    double prominence;
  };
  std::vector<Candidate> maxima;
  for (int i = 1; i + 1 < n; ++i) {
    const double prominence = smooth[i] - init.baseline;
    if (smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1] && prominence > 0.0) {
      maxima.push_back({i, prominence});
    }
  }
  std::stable_sort(maxima.begin(), maxima.end(),
                   [](const Candidate& a, const Candidate& b) { return a.prominence > b.prominence; });

  struct Region {
    int left, right;
  };
  std::vector<Region> taken;
  for (const auto& cand : maxima) {
    if (static_cast<int>(init.peaks.size()) == n_peaks) break;
    const bool inside = std::any_of(taken.begin(), taken.end(), [&](const Region& r) {
      return cand.index >= r.left && cand.index <= r.right;
    });
    if (inside) continue;
    const double half = init.baseline + 0.5 * cand.prominence;
    int left = cand.index;
    int right = cand.index;
    while (left > 0 && smooth[left - 1] > half) --left;
    while (right + 1 < n && smooth[right + 1] > half) ++right;
    taken.push_back({left, right});
    const double step = (f.back() - f.front()) / (n - 1);
    const double half_width = std::max(0.5 * (f[right] - f[left]), step);
    init.peaks.push_back({f[cand.index], 0.5 * half_width, 0.5 * half_width, cand.prominence});
  }
  if (static_cast<int>(init.peaks.size()) < n_peaks) {
    throw DomainError("ODMR initialization found " + std::to_string(init.peaks.size()) +
                      " peak(s) but " + std::to_string(n_peaks) + " were requested");
  }
  std::sort(init.peaks.begin(), init.peaks.end(),
            [](const VoigtParams& a, const VoigtParams& b) { return a.center < b.center; });
  return init;
}

FitResult fit_odmr(const OdmrSpectrum& spectrum, int n_peaks, const std::optional<OdmrInit>& init,
                   const FitOptions& options) {
  if (n_peaks != 1 && n_peaks != 2) throw DomainError("n_peaks must be 1 or 2");
  check(spectrum);
  if (static_cast<int>(spectrum.frequencies.size()) < 8 * n_peaks) {
    throw DomainError("ODMR spectrum needs at least 8 points per peak");
  }
  const OdmrInit guess = init ? *init : initial_odmr_guess(spectrum, n_peaks);
  if (static_cast<int>(guess.peaks.size()) != n_peaks) {
    throw DomainError("initial guess must provide exactly n_peaks lines");
  }

  const double f_lo = spectrum.frequencies.front();
  const double f_hi = spectrum.frequencies.back();
  const double inf = std::numeric_limits<double>::infinity();
  const Eigen::Index n = 1 + 4 * n_peaks;
  Model model{"odmr_voigt", {"baseline"}, odmr_model};
  Eigen::VectorXd p0(n);
  Bounds bounds = Bounds::unbounded(n);
  p0(0) = guess.baseline;
  for (int k = 0; k < n_peaks; ++k) {
    const std::string id = std::to_string(k + 1);
    model.parameter_names.insert(model.parameter_names.end(),
                                 {"center" + id + "_MHz", "amplitude" + id, "sigma" + id + "_MHz",
                                  "gamma" + id + "_MHz"});
    const auto& peak = guess.peaks[k];
    const Eigen::Index base = 1 + 4 * k;
    p0.segment(base, 4) << peak.center, peak.amplitude, peak.gaussian_sigma, peak.lorentzian_gamma;
    bounds.lower.segment(base, 4) << f_lo, 0.0, 1e-9, 1e-9;
    bounds.upper.segment(base, 4) << f_hi, inf, f_hi - f_lo, f_hi - f_lo;
  }
  p0 = project(p0, bounds);

  FitResult result = lm_fit(model, as_vector(spectrum.frequencies), as_vector(spectrum.contrast), p0,
                            bounds, options);
  // Report lines in ascending centre order.
  if (n_peaks == 2 && result.parameters(1) > result.parameters(5)) {
    result.parameters.segment(1, 4).swap(result.parameters.segment(5, 4));
    result.standard_errors.segment(1, 4).swap(result.standard_errors.segment(5, 4));
  }
  return result;
}

std::vector<VoigtParams> odmr_peaks(const FitResult& result) {
  std::vector<VoigtParams> peaks;
  for (Eigen::Index base = 1; base + 3 < result.parameters.size(); base += 4) {
    peaks.push_back({result.parameters(base), result.parameters(base + 2),
                     result.parameters(base + 3), result.parameters(base + 1)});
  }
  return peaks;
}

RabiInit initial_rabi_guess(const RabiTrace& trace) {
  check(trace);
  const auto& t = trace.durations;
  const auto& c = trace.contrast;
  const int n = static_cast<int>(t.size());
  if (n < 8) throw DomainError("Rabi trace needs at least 8 points");
  const double mean = std::accumulate(c.begin(), c.end(), 0.0) / n;
  const double period = (t.back() - t.front()) * n / (n - 1);

  auto power = [&](double freq) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) acc += (c[i] - mean) * std::polar(1.0, -2.0 * M_PI * freq * t[i]);
    return std::norm(acc);
  };
  std::vector<double> bins;
  for (int k = 1; k <= n / 2; ++k) bins.push_back(power(k / period));
  const auto peak = std::max_element(bins.begin(), bins.end());
  if (!(*peak > 2.0 * median(bins))) {
    throw DomainError("Rabi periodogram has no distinct peak; supply an initial guess");
  }
  const int k_peak = static_cast<int>(peak - bins.begin()) + 1;

  // Finer search between the neighbouring bins.
  double best_f = k_peak / period;
  double best_p = *peak;
  for (int s = -20; s <= 20; ++s) {
    const double freq = (k_peak + s / 20.0) / period;
    if (freq <= 0.0) continue;
    const double pw = power(freq);
    if (pw > best_p) {
      best_p = pw;
      best_f = freq;
    }
  }

  double amplitude = std::abs(c.front());
  if (amplitude == 0.0) {
    for (double v : c) amplitude = std::max(amplitude, std::abs(v - mean));
  }
  return {amplitude, best_f, 0.5 * (t.back() - t.front())};
}

FitResult fit_rabi(const RabiTrace& trace, const std::optional<RabiInit>& init, const FitOptions& options) {
  check(trace);
  if (trace.durations.size() < 8) throw DomainError("Rabi trace needs at least 8 points");
  const RabiInit guess = init ? *init : initial_rabi_guess(trace);
  const double span = trace.durations.back() - trace.durations.front();
  if (guess.f_rabi * span < 1.0) {
    throw DomainError("Rabi trace must span at least one oscillation period");
  }
  const double inf = std::numeric_limits<double>::infinity();
  Model model{"rabi_damped_cosine", {"a_rabi", "f_rabi_MHz", "t2_star_us"}, rabi_model};
  Bounds bounds{Eigen::Vector3d(0.0, 0.0, 1e-9), Eigen::Vector3d(inf, inf, inf)};
  const Eigen::VectorXd p0 = project(Eigen::Vector3d(guess.a_rabi, guess.f_rabi, guess.t2_star), bounds);
  return lm_fit(model, as_vector(trace.durations), as_vector(trace.contrast), p0, bounds, options);
}

std::string fit_result_json(const FitResult& result) {
  nlohmann::ordered_json j;
  j["model"] = result.model;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  nlohmann::ordered_json errors = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < result.parameter_names.size(); ++i) {
    params[result.parameter_names[i]] = result.parameters(static_cast<Eigen::Index>(i));
    errors[result.parameter_names[i]] = result.standard_errors(static_cast<Eigen::Index>(i));
  }
  j["params"] = params;
  j["stderr"] = errors;
  j["residual_norm"] = result.residual_norm;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  return j.dump(2) + "\n";
}

}  // namespace slitcpw
