#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "slitcpw/errors.hpp"

namespace slitcpw {

/// Ground-state parameters of an S = 3/2 spin with axial zero-field splitting.
/// Frequencies are in MHz, fields in gauss.
struct SpinParams {
  double zero_field_splitting_d = 35.0;  ///< D/h; the zero-field line sits at 2D/h
  double g_factor = 2.0;
  double bohr_mhz_per_gauss = 1.39965;   ///< mu_B/h

  static constexpr double spin = 1.5;

  /// g mu_B / h in MHz per gauss (2.7993 for g = 2).
  double gyromagnetic() const { return g_factor * bohr_mhz_per_gauss; }
};

void check(const SpinParams& params);

struct StaticField {
  double b0 = 0.0;  ///< gauss
  Eigen::Vector3d orientation = Eigen::Vector3d::UnitZ();  ///< unit vector; z is the c-axis

  static StaticField axial(double b0) { return {b0, Eigen::Vector3d::UnitZ()}; }
};

void check(const StaticField& field);

using SpinMatrix = Eigen::Matrix<std::complex<double>, 4, 4>;

/// Spin-3/2 operators in the |m> basis ordered m = +3/2, +1/2, -1/2, -3/2.
template <typename Scalar = double>
struct SpinOperators {
  using Matrix = Eigen::Matrix<std::complex<Scalar>, 4, 4>;
  Matrix x, y, z;

  SpinOperators() {
    using C = std::complex<Scalar>;
    const Scalar s = Scalar(3) / Scalar(2);
    Matrix raise = Matrix::Zero();
    for (int row = 0; row < 3; ++row) {
      const Scalar m = s - Scalar(row + 1);  // S+ |m> = c |m+1>
      raise(row, row + 1) = C(std::sqrt(s * (s + 1) - m * (m + 1)), 0);
    }
    const Matrix lower = raise.adjoint();
    x = (raise + lower) * C(Scalar(0.5), 0);
    y = (raise - lower) * C(0, Scalar(-0.5));
    z = Matrix::Zero();
    for (int row = 0; row < 4; ++row) z(row, row) = C(s - Scalar(row), 0);
  }
};

/// H/h in MHz: D [Sz^2 - S(S+1)/3] + (g mu_B / h) B0 (n . S).
SpinMatrix hamiltonian(const SpinParams& params, const StaticField& field);

struct Transition {
  int lower;              ///< eigen-level index (ascending energy)
  int upper;
  double frequency;       ///< MHz
  double sx_element;      ///< |<lower|Sx|upper>|
};

struct SpinSpectrum {
  std::array<double, 4> eigenvalues;     ///< MHz, ascending
  std::array<double, 4> sz_expectation;  ///< <Sz> of each eigenstate
  std::vector<Transition> transitions;   ///< all six level pairs
  int f_plus_transition = -1;            ///< index into transitions (|+3/2> <-> |+1/2> branch)
  int f_minus_transition = -1;           ///< index into transitions (|-3/2> <-> |-1/2> branch)
  double hermiticity_residual = 0.0;

  double f_plus() const { return transitions.at(f_plus_transition).frequency; }
  double f_minus() const { return transitions.at(f_minus_transition).frequency; }
};

/// Diagonalizes the Hamiltonian and tabulates every transition. The two
/// observed ODMR lines are identified by ranking eigenstates by <Sz>: the
/// upper pair forms the f+ branch and the lower pair the f- branch.
SpinSpectrum transition_frequencies(const SpinParams& params, const StaticField& field);

/// 2D/h + g mu_B B0/h for a field along the c-axis.
double f_plus(const SpinParams& params, double b0);
/// |2D/h - g mu_B B0/h| for a field along the c-axis.
double f_minus(const SpinParams& params, double b0);

/// sqrt(3) g mu_B B_ac / h, MHz.
double rabi_frequency(const SpinParams& params, double b_ac_x);

struct OdmrSpectrum {
  std::vector<double> frequencies;  ///< MHz, strictly increasing
  std::vector<double> contrast;     ///< (I1 - I0) / I0
};

struct RabiTrace {
  std::vector<double> durations;  ///< microseconds, strictly increasing, >= 0
  std::vector<double> contrast;
};

void check(const OdmrSpectrum& spectrum);
void check(const RabiTrace& trace);

/// Additive white Gaussian noise; sigma = 0 disables it.
struct Noise {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Peak-normalized Voigt line: amplitude is the contrast at the line centre.
struct OdmrLine {
  double amplitude = 0.004;
  double gaussian_sigma = 3.0;    ///< MHz
  double lorentzian_gamma = 2.0;  ///< MHz
};

struct OdmrLines {
  OdmrLine f_minus;
  OdmrLine f_plus;
};

/// Positive ODMR peaks centred on the f- and f+ transitions. A line with zero
/// amplitude is omitted.
OdmrSpectrum synthesize_odmr(const SpinParams& params, const StaticField& field,
                             const OdmrLines& lines, const std::vector<double>& frequencies,
                             const Noise& noise = {});

/// C(t) = -A cos(2 pi f t) exp(-t / T2*).
double rabi_contrast(double a_rabi, double f_rabi, double t2_star, double t);

RabiTrace synthesize_rabi(double a_rabi, double f_rabi, double t2_star,
                          const std::vector<double>& durations, const Noise& noise = {});

/// Evenly spaced samples begin, begin + step, ... up to and including end.
std::vector<double> linear_grid(double begin, double end, double step);

}  // namespace slitcpw
