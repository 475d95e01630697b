#include "slitcpw/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace slitcpw {

void check(const FieldProfile& profile) {
  if (profile.positions.size() != profile.values.size()) {
    throw DomainError("profile columns differ in length");
  }
  if (profile.positions.empty()) throw DomainError("profile is empty");
  for (std::size_t i = 1; i < profile.positions.size(); ++i) {
    if (!(profile.positions[i] > profile.positions[i - 1])) {
      throw DomainError("profile positions must be strictly increasing");
    }
  }
}

double rabi_to_field(const SpinParams& params, double f_rabi) {
  if (!(f_rabi >= 0.0)) throw DomainError("Rabi frequency must be >= 0");
  return f_rabi / (std::sqrt(3.0) * params.gyromagnetic());
}

ResonanceInversion b0_and_d_from_resonances(const SpinParams& params, double f_plus, double f_minus,
                                            const std::optional<DInterval>& prior) {
  if (!(f_minus >= 0.0) || !(f_plus >= f_minus)) {
    throw DomainError("resonances must satisfy f_plus >= f_minus >= 0");
  }
  const double gamma = params.gyromagnetic();
  ResonanceInversion out{
      {(f_plus - f_minus) / (2.0 * gamma), 0.25 * (f_plus + f_minus), std::nullopt},
      {(f_plus + f_minus) / (2.0 * gamma), 0.25 * (f_plus - f_minus), std::nullopt},
  };
  if (prior) {
    for (auto* branch : {&out.low_field, &out.high_field}) {
      branch->plausible = branch->d >= prior->lo && branch->d <= prior->hi;
    }
  }
  return out;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (xs.empty() || x < xs.front() || x > xs.back()) {
    throw DomainError("interpolation point outside the sampled range");
  }
  const auto upper = std::lower_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(upper - xs.begin());
  if (xs[i] == x) return ys[i];
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

FieldProfile normalize_profile(const FieldProfile& profile) {
  check(profile);
  if (profile.positions.front() > 0.0 || profile.positions.back() < 0.0) {
    throw DomainError("profile does not cover x = 0");
  }
  const double reference = interpolate(profile.positions, profile.values, 0.0);
  double scale = 0.0;
  for (double v : profile.values) scale = std::max(scale, std::abs(v));
  if (std::abs(reference) <= 1e-12 * scale || reference == 0.0) {
    throw DomainError("profile value at x = 0 is zero; cannot normalize");
  }
  FieldProfile out = profile;
  for (double& v : out.values) v /= reference;
  out.normalization_reference = profile.normalization_reference
                                    ? *profile.normalization_reference * reference
                                    : reference;
  return out;
}

ProfileComparison compare_profiles(const FieldProfile& measured, const FieldProfile& simulated) {
  check(measured);
  check(simulated);
  if (measured.positions.front() < simulated.positions.front() ||
      measured.positions.back() > simulated.positions.back()) {
    throw DomainError("measured positions extend outside the simulated range");
  }
  ProfileComparison out;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < measured.positions.size(); ++i) {
    const double x = measured.positions[i];
    const double sim = interpolate(simulated.positions, simulated.values, x);
    const double dev = measured.values[i] - sim;
    out.points.push_back({x, measured.values[i], sim, dev});
    sum_sq += dev * dev;
    out.max_deviation = std::max(out.max_deviation, std::abs(dev));
  }
  out.rms_deviation = std::sqrt(sum_sq / static_cast<double>(measured.positions.size()));
  return out;
}

std::string comparison_json(const ProfileComparison& comparison) {
  nlohmann::ordered_json j;
  j["rms_deviation"] = comparison.rms_deviation;
  j["max_deviation"] = comparison.max_deviation;
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const auto& p : comparison.points) {
    table.push_back({{"x_um", p.x}, {"measured", p.measured}, {"simulated", p.simulated},
                     {"deviation", p.deviation}});
  }
  j["points"] = table;
  return j.dump(2) + "\n";
}

}  // namespace slitcpw
