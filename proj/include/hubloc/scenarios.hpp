#pragma once

#include <cmath>
#include <vector>

#include "hubloc/core.hpp"

namespace hubloc {

/// Base setup costs and the multipliers that generate setup scenarios.
struct MultiplierFamily {
  std::vector<double> base;
  std::vector<double> multipliers;  // strictly positive, ascending
};

/// Evenly spaced 0.7 .. 1.3 family used for the west-region case study.
inline std::vector<double> default_case_study_multipliers() { return {0.7, 0.85, 1.0, 1.15, 1.3}; }

/// `count` multipliers evenly spaced on [low, high].
inline std::vector<double> evenly_spaced_multipliers(double low, double high, std::size_t count) {
  if (count == 0) throw InputError("multiplier count must be positive");
  if (count == 1) return {low};
  std::vector<double> out(count);
  for (std::size_t t = 0; t < count; ++t)
    out[t] = low + (high - low) * static_cast<double>(t) / static_cast<double>(count - 1);
  return out;
}

/// Scenario t has cost multiplier_t * base_k at node k.
inline std::vector<SetupScenario> build_setup_scenarios(const std::vector<double>& base,
                                                        const std::vector<double>& multipliers) {
  if (multipliers.empty()) throw InputError("build_setup_scenarios: no multipliers");
  for (std::size_t t = 0; t < multipliers.size(); ++t) {
    if (!(multipliers[t] > 0.0) || !std::isfinite(multipliers[t]))
      throw InputError("build_setup_scenarios: nonpositive multiplier at position " + std::to_string(t + 1));
    if (t > 0 && !(multipliers[t] > multipliers[t - 1]))
      throw InputError("build_setup_scenarios: multipliers must be strictly ascending");
  }
  std::vector<SetupScenario> out;
  for (double mult : multipliers) {
    SetupScenario f(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) f[k] = mult * base[k];
    out.push_back(std::move(f));
  }
  return out;
}

inline std::vector<SetupScenario> build_setup_scenarios(const MultiplierFamily& family) {
  return build_setup_scenarios(family.base, family.multipliers);
}

/// One demand scenario per season: the origin row carries that season's
/// per-destination demand, every other row is zero.
///
/// `seasonal[s][j]` is the season-s demand of destination j. The origin's
/// own market stays on the diagonal entry W[origin][origin]; it is routed
/// through a hub like any other destination.
inline std::vector<DemandScenario> build_seasonal_demands(const std::vector<std::vector<double>>& seasonal,
                                                          NodeIndex origin, const std::vector<double>& probabilities,
                                                          std::size_t n) {
  if (seasonal.size() != probabilities.size())
    throw InputError("build_seasonal_demands: " + std::to_string(seasonal.size()) + " seasons but " +
                     std::to_string(probabilities.size()) + " probabilities");
  if (origin >= n) throw InputError("build_seasonal_demands: origin index out of range");
  double psum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw InputError("build_seasonal_demands: negative probability");
    psum += p;
  }
  if (std::abs(psum - 1.0) > kProbabilityTolerance)
    throw InputError("build_seasonal_demands: probabilities sum " + detail::fmt_num(psum) + " != 1");

  std::vector<DemandScenario> out;
  for (std::size_t s = 0; s < seasonal.size(); ++s) {
    if (seasonal[s].size() != n)
      throw InputError("build_seasonal_demands: season " + std::to_string(s + 1) + " has " +
                       std::to_string(seasonal[s].size()) + " entries, expected " + std::to_string(n));
    DemandScenario sc{probabilities[s], Matrix(n)};
    for (std::size_t j = 0; j < n; ++j) {
      if (!(seasonal[s][j] >= 0.0)) throw InputError("build_seasonal_demands: negative demand");
      sc.demand(origin, j) = seasonal[s][j];
    }
    out.push_back(std::move(sc));
  }
  return out;
}

/// Equal-probability convenience overload.
inline std::vector<DemandScenario> build_seasonal_demands(const std::vector<std::vector<double>>& seasonal,
                                                          NodeIndex origin, std::size_t n) {
  const std::vector<double> p(seasonal.size(), seasonal.empty() ? 0.0 : 1.0 / static_cast<double>(seasonal.size()));
  return build_seasonal_demands(seasonal, origin, p, n);
}

}  // namespace hubloc
