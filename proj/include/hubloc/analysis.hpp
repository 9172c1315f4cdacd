#pragma once

// Seasonal re-optimization versus a single minimax-regret network.
//
// Accounting (all costs over a horizon of consecutive season slots):
//   seasonal(phi) = sum_t flow_t + sum_{distinct configs} setup + phi * B
//   fixed         = slots * expected_flow(y_mmr) + setup(y_mmr)
// where flow_t is the season's deterministic optimum (mean setup costs), the
// demand matrices are per-season totals, and B sums the re-configuration
// basis over every slot boundary whose hub set differs from the previous
// season's (the first slot is compared with the season that precedes it in
// the cycle). seasonal(phi) is affine, fixed is constant, so the crossing is
// computed exactly.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <vector>

#include "hubloc/core.hpp"
#include "hubloc/search.hpp"

namespace hubloc {

enum class ReconfigBasis {
  installed_configuration,  // mean setup cost of the configuration being installed
  all_configurations,       // total mean setup cost of every configuration the seasonal policy uses
};

struct PolicyOptions {
  double season_days = 90.0;
  ReconfigBasis basis = ReconfigBasis::installed_configuration;
};

struct SeasonSlot {
  std::size_t season;
  double days;
};

struct SeasonalPolicy {
  std::vector<Solution> season_solutions;  // one per demand scenario
  std::vector<SeasonSlot> slots;
  std::vector<HubSet> distinct_configurations;
  std::size_t reconfiguration_events = 0;
  double flow_total = 0.0;
  double setup_total = 0.0;
  double slope = 0.0;  // d cost / d phi

  double cost(double phi) const { return flow_total + setup_total + phi * slope; }
};

struct FixedPolicy {
  Solution solution;
  double expected_flow_per_season = 0.0;
  double flow_total = 0.0;
  double setup_total = 0.0;

  double cost() const { return flow_total + setup_total; }
};

struct BreakEvenPoint {
  double phi;
  double seasonal_total;
  double fixed_total;
};

struct BreakEvenReport {
  double horizon_days = 0.0;
  SeasonalPolicy seasonal;
  FixedPolicy fixed;
  std::vector<BreakEvenPoint> grid;
  std::optional<double> break_even;  // phi*, when it lies inside the grid range
  std::optional<double> raw_crossing;  // unrestricted affine intersection
};

namespace detail {

inline std::vector<SeasonSlot> horizon_slots(double horizon_days, double season_days, std::size_t seasons) {
  if (!(horizon_days > 0.0)) throw InputError("horizon_days must be positive");
  if (!(season_days > 0.0)) throw InputError("season_days must be positive");
  if (seasons == 0) throw InputError("instance has no demand scenarios");
  std::vector<SeasonSlot> out;
  double covered = 0.0;
  for (std::size_t t = 0; covered < horizon_days * (1.0 - 1e-12); ++t) {
    const double len = std::min(season_days, horizon_days - covered);
    out.push_back({t % seasons, len});
    covered += len;
  }
  return out;
}

}  // namespace detail

/// Re-solves the deterministic model per season and accumulates the
/// seasonal policy's cost terms over the horizon.
inline SeasonalPolicy seasonal_policy(const Instance& inst, double horizon_days, const PolicyOptions& opt = {},
                                      const SearchConfig& cfg = {}) {
  SeasonalPolicy pol;
  pol.slots = detail::horizon_slots(horizon_days, opt.season_days, inst.demand_scenarios.size());
  const auto setup = mean_setup(inst);
  for (std::size_t s = 0; s < inst.demand_scenarios.size(); ++s) {
    auto sol = solve_deterministic(inst, inst.demand_scenarios[s].demand, setup, cfg);
    if (sol.status != SolveStatus::optimal)
      throw InputError("seasonal policy: season " + std::to_string(s + 1) + " is infeasible");
    pol.season_solutions.push_back(std::move(sol));
  }

  const std::size_t ns = pol.season_solutions.size();
  for (const auto& slot : pol.slots) {
    pol.flow_total += pol.season_solutions[slot.season].flow_cost * slot.days / opt.season_days;
    const HubSet& h = pol.season_solutions[slot.season].hub_set;
    if (std::find(pol.distinct_configurations.begin(), pol.distinct_configurations.end(), h) ==
        pol.distinct_configurations.end())
      pol.distinct_configurations.push_back(h);
  }
  for (const auto& h : pol.distinct_configurations) pol.setup_total += setup_cost(h, setup);

  for (const auto& slot : pol.slots) {
    const std::size_t prev = (slot.season + ns - 1) % ns;
    const HubSet& now = pol.season_solutions[slot.season].hub_set;
    if (now == pol.season_solutions[prev].hub_set) continue;
    ++pol.reconfiguration_events;
    pol.slope += opt.basis == ReconfigBasis::installed_configuration ? setup_cost(now, setup) : pol.setup_total;
  }
  return pol;
}

inline double seasonal_policy_cost(const Instance& inst, double horizon_days, double phi,
                                   const PolicyOptions& opt = {}, const SearchConfig& cfg = {}) {
  if (!(phi >= 0.0)) throw InputError("phi must be nonnegative");
  return seasonal_policy(inst, horizon_days, opt, cfg).cost(phi);
}

/// The minimax-regret network kept for the whole horizon.
inline FixedPolicy fixed_policy(const Instance& inst, const Solution& regret_solution, double horizon_days,
                                const PolicyOptions& opt = {}) {
  if (regret_solution.status != SolveStatus::optimal) throw InputError("fixed policy: minimax solution is infeasible");
  FixedPolicy pol;
  pol.solution = regret_solution;
  pol.expected_flow_per_season = solve_allocation_multi(inst, regret_solution.hub_set).flow_cost;
  pol.flow_total = pol.expected_flow_per_season * horizon_days / opt.season_days;
  pol.setup_total = setup_cost(regret_solution.hub_set, mean_setup(inst));
  return pol;
}

/// Evaluates both policies on `phi_grid` and locates the exact crossing.
inline BreakEvenReport break_even(const Instance& inst, double horizon_days, const std::vector<double>& phi_grid,
                                  const PolicyOptions& opt = {}, const SearchConfig& cfg = {}) {
  if (phi_grid.empty()) throw InputError("break_even: empty phi grid");
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    if (!(phi_grid[i] >= 0.0)) throw InputError("break_even: phi values must be nonnegative");
    if (i > 0 && phi_grid[i] < phi_grid[i - 1]) throw InputError("break_even: phi grid must be sorted ascending");
  }
  BreakEvenReport rep;
  rep.horizon_days = horizon_days;
  rep.seasonal = seasonal_policy(inst, horizon_days, opt, cfg);
  const auto mmr = solve_minimax_regret(inst, cfg);
  if (mmr.solution.status != SolveStatus::optimal) throw InputError("break_even: " + mmr.diagnostic);
  rep.fixed = fixed_policy(inst, mmr.solution, horizon_days, opt);

  const double fixed = rep.fixed.cost();
  for (double phi : phi_grid) rep.grid.push_back({phi, rep.seasonal.cost(phi), fixed});

  if (rep.seasonal.slope > 0.0) {
    const double phi = (fixed - rep.seasonal.cost(0.0)) / rep.seasonal.slope;
    rep.raw_crossing = phi;
    if (phi >= phi_grid.front() && phi <= phi_grid.back()) rep.break_even = phi;
  }
  return rep;
}

/// Evenly spaced grid 0, step, ..., max (inclusive, within rounding).
inline std::vector<double> phi_grid(double phi_max, double step) {
  if (!(phi_max >= 0.0)) throw InputError("phi_max must be nonnegative");
  if (phi_max == 0.0) return {0.0};
  if (!(step > 0.0)) throw InputError("phi step must be positive");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor(phi_max / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) out.push_back(static_cast<double>(i) * step);
  if (out.back() < phi_max * (1.0 - 1e-12)) out.push_back(phi_max);
  return out;
}

/// Tab-delimited grid: phi, seasonal_total, fixed_total.
inline void write_break_even_table(std::ostream& os, const BreakEvenReport& rep) {
  const auto old = os.precision(17);
  os << "phi\tseasonal_total\tfixed_total\n";
  for (const auto& p : rep.grid) os << p.phi << '\t' << p.seasonal_total << '\t' << p.fixed_total << '\n';
  os.precision(old);
}

}  // namespace hubloc
