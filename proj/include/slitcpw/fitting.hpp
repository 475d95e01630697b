#pragma once

#include <Eigen/Core>

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slitcpw/errors.hpp"
#include "slitcpw/spinphys.hpp"

namespace slitcpw {

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0.
std::complex<double> faddeeva(std::complex<double> z);

/// Voigt profile: unit-area convolution of a Gaussian (standard deviation
/// `sigma`) with a Lorentzian (half width `gamma`), evaluated at offset `x`.
double voigt(double x, double sigma, double gamma);

struct VoigtParams {
  double center;            ///< MHz
  double gaussian_sigma;    ///< MHz
  double lorentzian_gamma;  ///< MHz
  double amplitude;         ///< peak contrast
};

/// Model values at every abscissa in x for parameter vector p.
using ModelFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& p)>;

struct Model {
  std::string name;
  std::vector<std::string> parameter_names;
  ModelFunction evaluate;
};

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Bounds unbounded(Eigen::Index n);
};

struct FitOptions {
  int max_iterations = 200;
  double cost_tolerance = 1e-10;  ///< relative decrease of an accepted step
  double step_tolerance = 1e-10;  ///< step norm, scaled by (1 + |p|)
};

struct FitResult {
  std::string model;
  std::vector<std::string> parameter_names;
  Eigen::VectorXd parameters;
  Eigen::VectorXd standard_errors;
  double residual_norm = 0.0;  ///< sqrt of the residual sum of squares
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_history;  ///< cost after every accepted step, starting point first

  double value(const std::string& name) const;
  double standard_error(const std::string& name) const;
};

/// Levenberg-Marquardt least squares with central-difference Jacobian and
/// box bounds enforced by projection. The data are put in canonical (x, y)
/// order first, so the result does not depend on how the points are listed.
FitResult lm_fit(const Model& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& initial, const Bounds& bounds, const FitOptions& options = {});

/// ODMR fit parameters for n peaks: baseline, then per peak (ordered by
/// centre) centerK_MHz, amplitudeK, sigmaK_MHz, gammaK_MHz.
struct OdmrInit {
  double baseline = 0.0;
  std::vector<VoigtParams> peaks;
};

/// Automatic initial guess from smoothed local maxima.
OdmrInit initial_odmr_guess(const OdmrSpectrum& spectrum, int n_peaks);

FitResult fit_odmr(const OdmrSpectrum& spectrum, int n_peaks,
                   const std::optional<OdmrInit>& init = std::nullopt, const FitOptions& options = {});

/// Fitted lines of an ODMR fit, ordered by centre.
std::vector<VoigtParams> odmr_peaks(const FitResult& result);

struct RabiInit {
  double a_rabi;
  double f_rabi;   ///< MHz
  double t2_star;  ///< microseconds
};

/// Automatic initial guess: frequency from the dominant periodogram bin.
RabiInit initial_rabi_guess(const RabiTrace& trace);

/// Fits C(t) = -A cos(2 pi f t) exp(-t/T2*); parameters a_rabi, f_rabi_MHz, t2_star_us.
FitResult fit_rabi(const RabiTrace& trace, const std::optional<RabiInit>& init = std::nullopt,
                   const FitOptions& options = {});

/// `{ "model", "params", "stderr", "residual_norm", "iterations", "converged" }`
std::string fit_result_json(const FitResult& result);

}  // namespace slitcpw
