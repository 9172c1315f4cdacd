#pragma once

// Independent reference solvers used by the property tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "hubloc/hubloc.hpp"

namespace oracle {

using hubloc::HubMask;
using hubloc::HubSet;
using hubloc::Instance;
using hubloc::LpProblem;
using hubloc::LpStatus;
using hubloc::Matrix;
using hubloc::NodeIndex;
using hubloc::RowSense;

struct VertexResult {
  LpStatus status;
  double value;
};

namespace detail {

// Solves the square system by Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-10) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

struct Halfspace {
  std::vector<double> a;
  double b;
  RowSense sense;
};

inline bool satisfies(const Halfspace& h, const std::vector<double>& x) {
  double lhs = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) lhs += h.a[j] * x[j];
  const double tol = 1e-7 * (1.0 + std::abs(h.b));
  switch (h.sense) {
    case RowSense::less_equal: return lhs <= h.b + tol;
    case RowSense::greater_equal: return lhs >= h.b - tol;
    case RowSense::equal: return std::abs(lhs - h.b) <= tol;
  }
  return false;
}

// Minimum over the vertices of the problem intersected with the box x <= box.
inline std::optional<double> boxed_vertex_min(const LpProblem& lp, double box) {
  const std::size_t n = lp.num_vars;
  std::vector<Halfspace> hs;
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    std::vector<double> a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = lp.a(r, j);
    hs.push_back({a, lp.rhs[r], lp.senses[r]});
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    hs.push_back({e, 0.0, RowSense::greater_equal});
    hs.push_back({e, std::min(lp.upper[j], box), RowSense::less_equal});
  }
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  // iterate over n-subsets of the halfspaces
  std::vector<bool> sel(hs.size(), false);
  std::fill(sel.begin(), sel.begin() + static_cast<std::ptrdiff_t>(std::min(n, hs.size())), true);
  if (n > hs.size()) return std::nullopt;
  do {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < hs.size(); ++i)
      if (sel[i]) {
        a.push_back(hs[i].a);
        b.push_back(hs[i].b);
      }
    const auto x = solve_square(a, b);
    if (!x) continue;
    if (!std::all_of(hs.begin(), hs.end(), [&](const Halfspace& h) { return satisfies(h, *x); })) continue;
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) v += lp.objective[j] * (*x)[j];
    if (!best || v < *best) best = v;
  } while (std::prev_permutation(sel.begin(), sel.end()));
  return best;
}

}  // namespace detail

/// Exhaustive vertex enumeration for tiny LPs (x >= 0). Unboundedness is
/// detected by comparing the optimum under two very different boxes.
inline VertexResult vertex_enumeration(const LpProblem& lp) {
  const auto small = detail::boxed_vertex_min(lp, 1e7);
  if (!small) return {LpStatus::infeasible, 0.0};
  const auto large = detail::boxed_vertex_min(lp, 1e9);
  if (std::abs(*large - *small) > 1e-6 * (1.0 + std::abs(*small))) return {LpStatus::unbounded, 0.0};
  return {LpStatus::optimal, *small};
}

/// The allocation LP posed directly over x_ijkm (every open k and m).
inline std::optional<double> full_x_allocation(const Instance& inst, const HubSet& hubs, const Matrix& objective_demand,
                                               const std::vector<const Matrix*>& capacity_demands) {
  const std::size_t n = inst.size();
  const auto open = hubs.indices();
  struct Var {
    NodeIndex i, j, k, m;
  };
  std::vector<Var> vars;
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = 0; j < n; ++j) {
      bool pos = objective_demand(i, j) > 0.0;
      for (const Matrix* w : capacity_demands) pos = pos || (*w)(i, j) > 0.0;
      if (!pos) continue;
      pairs.emplace_back(i, j);
      for (NodeIndex k : open)
        for (NodeIndex m : open) vars.push_back({i, j, k, m});
    }
  if (pairs.empty()) return 0.0;
  LpProblem lp(vars.size());
  for (std::size_t v = 0; v < vars.size(); ++v)
    lp.objective[v] = objective_demand(vars[v].i, vars[v].j) *
                      hubloc::unit_cost(inst, vars[v].i, vars[v].j, vars[v].k, vars[v].m);
  for (auto [i, j] : pairs) {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (vars[v].i == i && vars[v].j == j) row.emplace_back(v, 1.0);
    lp.add_sparse_row(row, RowSense::equal, 1.0);
  }
  for (const Matrix* w : capacity_demands)
    for (NodeIndex k : open) {
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t v = 0; v < vars.size(); ++v)
        if (vars[v].k == k && (*w)(vars[v].i, vars[v].j) != 0.0) row.emplace_back(v, (*w)(vars[v].i, vars[v].j));
      if (!row.empty()) lp.add_sparse_row(row, RowSense::less_equal, inst.capacities[k]);
    }
  const auto r = hubloc::solve_lp(lp);
  if (r.status != LpStatus::optimal) return std::nullopt;
  return r.value;
}

inline std::optional<double> full_x_multi(const Instance& inst, const HubSet& hubs) {
  std::vector<const Matrix*> caps;
  for (const auto& sc : inst.demand_scenarios) caps.push_back(&sc.demand);
  return full_x_allocation(inst, hubs, hubloc::expected_demand(inst), caps);
}

/// Z*_{s'} by brute force over every nonempty hub set with the full x LP.
inline std::optional<double> brute_scenario_optimum(const Instance& inst, std::size_t t) {
  std::optional<double> best;
  const std::size_t n = inst.size();
  for (HubMask m = 1; m < (HubMask{1} << n); ++m) {
    const HubSet h = hubloc::mask_to_hubset(m, n);
    const auto f = full_x_multi(inst, h);
    if (!f) continue;
    const double v = *f + hubloc::setup_cost(h, inst.setup_scenarios[t]);
    if (!best || v < *best) best = v;
  }
  return best;
}

/// Minimax-regret model with y fixed, as one LP over (x_ijkm, R+, R-):
///   min R  s.t.  R >= E[flow](x) + F_{s'}(y) - Z*_{s'}  for every s'
/// plus assignment and per-scenario capacity rows.
inline std::optional<double> linearized_regret(const Instance& inst, const HubSet& hubs,
                                               const std::vector<double>& z_star) {
  const std::size_t n = inst.size();
  const auto open = hubs.indices();
  const Matrix w_bar = hubloc::expected_demand(inst);
  struct Var {
    NodeIndex i, j, k, m;
  };
  std::vector<Var> vars;
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = 0; j < n; ++j) {
      bool pos = false;
      for (const auto& sc : inst.demand_scenarios) pos = pos || sc.demand(i, j) > 0.0;
      if (!pos) continue;
      pairs.emplace_back(i, j);
      for (NodeIndex k : open)
        for (NodeIndex m : open) vars.push_back({i, j, k, m});
    }
  const std::size_t rp = vars.size(), rm = vars.size() + 1;
  LpProblem lp(vars.size() + 2);
  lp.objective[rp] = 1.0;
  lp.objective[rm] = -1.0;
  for (std::size_t t = 0; t < inst.setup_scenarios.size(); ++t) {
    // E[flow] - R <= Z* - F(y)
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t v = 0; v < vars.size(); ++v)
      row.emplace_back(v, w_bar(vars[v].i, vars[v].j) * hubloc::unit_cost(inst, vars[v].i, vars[v].j, vars[v].k, vars[v].m));
    row.emplace_back(rp, -1.0);
    row.emplace_back(rm, 1.0);
    lp.add_sparse_row(row, RowSense::less_equal, z_star[t] - hubloc::setup_cost(hubs, inst.setup_scenarios[t]));
  }
  for (auto [i, j] : pairs) {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (vars[v].i == i && vars[v].j == j) row.emplace_back(v, 1.0);
    lp.add_sparse_row(row, RowSense::equal, 1.0);
  }
  for (const auto& sc : inst.demand_scenarios)
    for (NodeIndex k : open) {
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t v = 0; v < vars.size(); ++v)
        if (vars[v].k == k && sc.demand(vars[v].i, vars[v].j) != 0.0) row.emplace_back(v, sc.demand(vars[v].i, vars[v].j));
      if (!row.empty()) lp.add_sparse_row(row, RowSense::less_equal, inst.capacities[k]);
    }
  const auto r = hubloc::solve_lp(lp);
  if (r.status != LpStatus::optimal) return std::nullopt;
  return r.value;
}

struct RandomSpec {
  std::size_t min_nodes = 2;
  std::size_t max_nodes = 5;
  std::size_t max_demand_scenarios = 2;
  std::size_t max_setup_scenarios = 2;
  double capacity_low = 0.25;   // fraction of the largest scenario total
  double capacity_high = 0.9;
};

/// Small random instance with integer data.
inline Instance random_instance(std::mt19937_64& rng, const RandomSpec& spec = {}) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const std::size_t n = static_cast<std::size_t>(uni(static_cast<int>(spec.min_nodes), static_cast<int>(spec.max_nodes)));
  Instance inst;
  inst.name = "random";
  for (std::size_t i = 0; i < n; ++i) inst.nodes.push_back("v" + std::to_string(i + 1));
  inst.distances = Matrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) inst.distances(i, j) = inst.distances(j, i) = uni(1, 30);
  inst.coefficients = {real(0.1, 1.0), 1.0, 1.0};

  const std::size_t nd = static_cast<std::size_t>(uni(1, static_cast<int>(spec.max_demand_scenarios)));
  double psum = 0.0;
  for (std::size_t s = 0; s < nd; ++s) {
    hubloc::DemandScenario sc{static_cast<double>(uni(1, 4)), Matrix(n)};
    psum += sc.probability;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && uni(0, 3) > 0) sc.demand(i, j) = uni(1, 20);
    inst.demand_scenarios.push_back(std::move(sc));
  }
  for (auto& sc : inst.demand_scenarios) sc.probability /= psum;
  const double total = hubloc::max_total_demand(inst);
  for (std::size_t k = 0; k < n; ++k)
    inst.capacities.push_back(std::max(1.0, std::round(total * real(spec.capacity_low, spec.capacity_high))));

  const std::size_t ns = static_cast<std::size_t>(uni(1, static_cast<int>(spec.max_setup_scenarios)));
  for (std::size_t t = 0; t < ns; ++t) {
    hubloc::SetupScenario f(n);
    for (auto& v : f) v = uni(0, 400);
    inst.setup_scenarios.push_back(std::move(f));
  }
  return inst;
}

/// Random LP with at most 4 variables and 4 rows, integer data in [-9, 9].
inline LpProblem random_tiny_lp(std::mt19937_64& rng) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const std::size_t nv = static_cast<std::size_t>(uni(1, 4));
  const std::size_t nr = static_cast<std::size_t>(uni(1, 4));
  LpProblem lp(nv);
  for (auto& c : lp.objective) c = uni(-9, 9);
  for (std::size_t r = 0; r < nr; ++r) {
    std::vector<double> row(nv);
    for (auto& a : row) a = uni(-9, 9);
    const int s = uni(0, 5);
    const RowSense sense = s < 3 ? RowSense::less_equal : s < 5 ? RowSense::greater_equal : RowSense::equal;
    lp.add_row(row, sense, uni(-9, 9));
  }
  if (uni(0, 2) == 0)
    for (auto& u : lp.upper) u = uni(1, 9);
  return lp;
}

}  // namespace oracle
