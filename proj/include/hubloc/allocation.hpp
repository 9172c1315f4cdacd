#pragma once

// Allocation subproblem for a fixed hub set.
//
// Capacity rows touch x_ijkm only through sum_m x_ijkm and the objective is
// separable in m, so every (i, j, k) flow can sit on its cheapest open second
// hub. The LP is therefore posed over z_ijk = sum_m x_ijkm with reduced costs,
// and expanded back to x_ijkm afterwards.

#include <utility>
#include <vector>

#include "hubloc/core.hpp"
#include "hubloc/costs.hpp"
#include "hubloc/simplex.hpp"

namespace hubloc {

struct AllocationResult {
  SolveStatus status = SolveStatus::infeasible;
  AllocationPlan plan;
  double flow_cost = 0.0;
  // loads[s][k]: flow entering first hub k under capacity scenario s
  std::vector<std::vector<double>> loads;
  std::size_t lp_iterations = 0;
};

/// x_ijkm in sparse form.
struct RouteFraction {
  NodeIndex origin;
  NodeIndex destination;
  NodeIndex first_hub;
  NodeIndex second_hub;
  double fraction;
};

namespace detail {

constexpr double kFractionCutoff = 1e-12;

/// Shared LP builder: objective weights from `objective_demand`, one capacity
/// row per (open hub, capacity matrix).
inline AllocationResult solve_reduced(const Instance& inst, const HubSet& hubs, const Matrix& objective_demand,
                                      const std::vector<const Matrix*>& capacity_demands) {
  const std::size_t n = inst.size();
  if (hubs.size() != n) throw InputError("allocation: hub set size mismatch");
  if (hubs.empty()) throw InputError("allocation: empty hub set");
  if (objective_demand.size() != n) throw InputError("allocation: demand dimension mismatch");
  for (const Matrix* w : capacity_demands)
    if (w->size() != n) throw InputError("allocation: demand dimension mismatch");

  AllocationResult res;
  res.loads.assign(capacity_demands.size(), std::vector<double>(n, 0.0));

  // Necessary condition only; the LP below decides.
  const double cap = total_capacity(inst, hubs);
  for (const Matrix* w : capacity_demands)
    if (w->sum() > cap * (1.0 + 1e-12)) return res;

  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = 0; j < n; ++j) {
      bool positive = objective_demand(i, j) > 0.0;
      for (const Matrix* w : capacity_demands) positive = positive || (*w)(i, j) > 0.0;
      if (positive) pairs.emplace_back(i, j);
    }

  const auto open = hubs.indices();
  const ReducedCost red(inst, hubs);
  const std::size_t h = open.size();
  const std::size_t nv = pairs.size() * h;

  res.status = SolveStatus::optimal;
  if (pairs.empty()) return res;

  LpProblem lp(nv);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto [i, j] = pairs[p];
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t q = 0; q < h; ++q) {
      lp.objective[p * h + q] = objective_demand(i, j) * red.cost(i, j, open[q]);
      row.emplace_back(p * h + q, 1.0);
    }
    lp.add_sparse_row(row, RowSense::equal, 1.0);
  }
  for (const Matrix* w : capacity_demands) {
    for (std::size_t q = 0; q < h; ++q) {
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double v = (*w)(pairs[p].first, pairs[p].second);
        if (v != 0.0) row.emplace_back(p * h + q, v);
      }
      if (!row.empty()) lp.add_sparse_row(row, RowSense::less_equal, inst.capacities[open[q]]);
    }
  }

  const LpResult lr = solve_lp(lp);
  res.lp_iterations = lr.iterations;
  if (lr.status != LpStatus::optimal) {
    res.status = SolveStatus::infeasible;
    return res;
  }

  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto [i, j] = pairs[p];
    for (std::size_t q = 0; q < h; ++q) {
      const double z = lr.x[p * h + q];
      if (z <= kFractionCutoff) continue;
      const NodeIndex k = open[q];
      res.plan.entries.push_back({i, j, k, red.second_hub(i, j, k), z});
      for (std::size_t s = 0; s < capacity_demands.size(); ++s) res.loads[s][k] += (*capacity_demands[s])(i, j) * z;
    }
  }
  res.flow_cost = lr.value;
  return res;
}

}  // namespace detail

/// Minimum flow cost for one demand matrix with the hub set fixed.
inline AllocationResult solve_allocation(const Instance& inst, const HubSet& hubs, const Matrix& demand) {
  return detail::solve_reduced(inst, hubs, demand, {&demand});
}

/// Minimum expected flow cost over the demand scenarios, with a single
/// routing that respects hub capacity in every scenario.
inline AllocationResult solve_allocation_multi(const Instance& inst, const HubSet& hubs) {
  std::vector<const Matrix*> caps;
  for (const auto& sc : inst.demand_scenarios) caps.push_back(&sc.demand);
  return detail::solve_reduced(inst, hubs, expected_demand(inst), caps);
}

inline std::vector<RouteFraction> expand_plan(const AllocationPlan& plan) {
  std::vector<RouteFraction> out;
  out.reserve(plan.entries.size());
  for (const auto& e : plan.entries)
    out.push_back({e.origin, e.destination, e.first_hub, e.second_hub, e.fraction});
  return out;
}

/// sum W_ij * C_ijkm * x_ijkm, priced from scratch.
inline double reprice(const Instance& inst, const std::vector<RouteFraction>& routes, const Matrix& demand) {
  double total = 0.0;
  for (const auto& r : routes)
    total += demand(r.origin, r.destination) * unit_cost(inst, r.origin, r.destination, r.first_hub, r.second_hub) *
             r.fraction;
  return total;
}

/// Uncapacitated flow cost for the hub set; a lower bound on any allocation.
inline double uncapacitated_flow_cost(const Instance& inst, const HubSet& hubs, const Matrix& demand) {
  const ReducedCost red(inst, hubs);
  double total = 0.0;
  for (NodeIndex i = 0; i < inst.size(); ++i)
    for (NodeIndex j = 0; j < inst.size(); ++j)
      if (demand(i, j) > 0.0) total += demand(i, j) * red.best_route(i, j);
  return total;
}

}  // namespace hubloc
