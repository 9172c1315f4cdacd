#pragma once

// Exact optimization over the hub vector by pruned subset enumeration.
//
// Candidates are scored in order of a cheap lower bound (uncapacitated flow
// cost plus setup); a candidate is skipped once its bound clears the
// incumbent by more than the tie tolerance. The winner is the minimum
// objective, with near-ties (relative 1e-9) going to the lexicographically
// smallest hub-index vector. Because every near-tie survives pruning, the
// result does not depend on pruning, thread count or evaluation order.

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>
#include <unordered_map>
#include <vector>

#include "hubloc/allocation.hpp"
#include "hubloc/core.hpp"

namespace hubloc {

struct SearchConfig {
  std::size_t max_nodes_exhaustive = 20;
  bool enable_pruning = true;
  std::optional<double> time_limit_seconds;
  std::size_t threads = 0;  // 0: hardware concurrency
};

class SearchLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using HubMask = std::uint32_t;

inline HubSet mask_to_hubset(HubMask mask, std::size_t n) {
  HubSet h(n);
  for (NodeIndex k = 0; k < n; ++k)
    if (mask & (HubMask{1} << k)) h.set(k);
  return h;
}

inline HubMask hubset_to_mask(const HubSet& h) {
  HubMask m = 0;
  for (NodeIndex k : h.indices()) m |= HubMask{1} << k;
  return m;
}

/// Lexicographic comparison of the ascending index vectors of two masks.
inline bool mask_lex_less(HubMask a, HubMask b) {
  while (a && b) {
    const int la = std::countr_zero(a), lb = std::countr_zero(b);
    if (la != lb) return la < lb;
    a &= a - 1;
    b &= b - 1;
  }
  return !a && b;
}

namespace detail {

inline void check_size(const Instance& inst, const SearchConfig& cfg) {
  if (cfg.max_nodes_exhaustive < 1) throw InputError("max_nodes_exhaustive must be >= 1");
  if (inst.size() > cfg.max_nodes_exhaustive || inst.size() > 31)
    throw InputError("instance has " + std::to_string(inst.size()) + " nodes; exhaustive search limited to " +
                     std::to_string(std::min<std::size_t>(cfg.max_nodes_exhaustive, 31)));
}

inline void lex_masks(std::size_t n, std::size_t start, HubMask prefix, std::vector<HubMask>& out) {
  for (std::size_t k = start; k < n; ++k) {
    const HubMask m = prefix | (HubMask{1} << k);
    out.push_back(m);
    lex_masks(n, k + 1, m, out);
  }
}

inline double mask_capacity(const Instance& inst, HubMask m) {
  double s = 0.0;
  for (NodeIndex k = 0; k < inst.size(); ++k)
    if (m & (HubMask{1} << k)) s += inst.capacities[k];
  return s;
}

inline double mask_setup(const std::vector<double>& setup, HubMask m) {
  double s = 0.0;
  for (NodeIndex k = 0; k < setup.size(); ++k)
    if (m & (HubMask{1} << k)) s += setup[k];
  return s;
}

constexpr double kTieTolerance = 1e-9;

inline double tie_slack(double v) { return kTieTolerance * (1.0 + std::abs(v)); }

struct Scored {
  double objective;
  HubMask mask;
};

/// min over candidates, with near-ties resolved lexicographically.
inline std::optional<Scored> pick_best(const std::vector<Scored>& all) {
  if (all.empty()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : all) best = std::min(best, s.objective);
  std::optional<Scored> out;
  for (const auto& s : all) {
    if (s.objective > best + tie_slack(best)) continue;
    if (!out || mask_lex_less(s.mask, out->mask)) out = s;
  }
  return out;
}

inline std::size_t thread_count(const SearchConfig& cfg) {
  std::size_t t = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  return std::max<std::size_t>(1, t);
}

/// Bounded minimization over `masks`. `bound(m)` must never exceed
/// `score(m)`; `score` returns nullopt for infeasible masks.
inline std::optional<Scored> bounded_min(const std::vector<HubMask>& masks, const std::function<double(HubMask)>& bound,
                                         const std::function<std::optional<double>(HubMask)>& score,
                                         const SearchConfig& cfg) {
  const std::size_t total = masks.size();
  std::vector<double> lb(total, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  if (cfg.enable_pruning) {
    for (std::size_t i = 0; i < total; ++i) lb[i] = bound(masks[i]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lb[a] < lb[b]; });
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::atomic<bool> timed_out{false};
  std::mutex mu;
  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<Scored> evaluated;
  std::exception_ptr error;

  auto worker = [&]() {
    try {
      while (!stop.load()) {
        const std::size_t pos = next.fetch_add(1);
        if (pos >= total) break;
        const std::size_t idx = order[pos];
        if (cfg.time_limit_seconds) {
          const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;
          if (el.count() > *cfg.time_limit_seconds) {
            timed_out = true;
            stop = true;
            break;
          }
        }
        if (cfg.enable_pruning) {
          double inc;
          {
            std::lock_guard lk(mu);
            inc = incumbent;
          }
          // order is sorted by bound, so nothing later can win either
          if (lb[idx] > inc + 2.0 * tie_slack(inc)) {
            stop = true;
            break;
          }
        }
        const auto v = score(masks[idx]);
        if (!v) continue;
        std::lock_guard lk(mu);
        evaluated.push_back({*v, masks[idx]});
        incumbent = std::min(incumbent, *v);
      }
    } catch (...) {
      std::lock_guard lk(mu);
      if (!error) error = std::current_exception();
      stop = true;
    }
  };

  const std::size_t nt = std::min(thread_count(cfg), std::max<std::size_t>(total, 1));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  if (timed_out) throw SearchLimitError("search time limit exceeded");
  return pick_best(evaluated);
}

/// Thread-safe memo of expected (multi-scenario) flow cost per hub mask.
class FlowTable {
 public:
  explicit FlowTable(const Instance& inst) : inst_(&inst) {}

  std::optional<double> get(HubMask m) {
    {
      std::lock_guard lk(mu_);
      if (auto it = memo_.find(m); it != memo_.end()) return it->second;
    }
    const auto r = solve_allocation_multi(*inst_, mask_to_hubset(m, inst_->size()));
    std::optional<double> v;
    if (r.status == SolveStatus::optimal) v = r.flow_cost;
    std::lock_guard lk(mu_);
    memo_.emplace(m, v);
    return v;
  }

 private:
  const Instance* inst_;
  std::mutex mu_;
  std::unordered_map<HubMask, std::optional<double>> memo_;
};

}  // namespace detail

/// Candidate hub masks in lexicographic order of their index vectors.
/// With pruning, masks whose total capacity is below `min_capacity` are
/// skipped.
inline std::vector<HubMask> enumerate_hub_masks(std::size_t n, const std::vector<double>& capacities,
                                                double min_capacity, bool prune) {
  std::vector<HubMask> all;
  all.reserve((std::size_t{1} << n) - 1);
  detail::lex_masks(n, 0, 0, all);
  if (!prune) return all;
  std::vector<HubMask> out;
  for (HubMask m : all) {
    double cap = 0.0;
    for (NodeIndex k = 0; k < n; ++k)
      if (m & (HubMask{1} << k)) cap += capacities[k];
    if (cap >= min_capacity * (1.0 - 1e-12)) out.push_back(m);
  }
  return out;
}

/// Every nonempty hub subset, capacity-filtered against the largest
/// scenario demand when pruning is on.
inline std::vector<HubSet> enumerate_hub_sets(const Instance& inst, const SearchConfig& cfg) {
  detail::check_size(inst, cfg);
  std::vector<HubSet> out;
  for (HubMask m : enumerate_hub_masks(inst.size(), inst.capacities, max_total_demand(inst), cfg.enable_pruning))
    out.push_back(mask_to_hubset(m, inst.size()));
  return out;
}

namespace detail {

inline Solution make_solution(const HubSet& hubs, const AllocationResult& alloc, double setup) {
  Solution s;
  s.hub_set = hubs;
  s.allocation = alloc.plan;
  s.flow_cost = alloc.flow_cost;
  s.setup_cost = setup;
  s.objective = alloc.flow_cost + setup;
  s.status = alloc.status;
  return s;
}

inline Solution infeasible_solution(std::size_t n) {
  Solution s;
  s.hub_set = HubSet(n);
  s.status = SolveStatus::infeasible;
  return s;
}

}  // namespace detail

/// Global optimum of flow cost under `demand` plus setup cost.
inline Solution solve_deterministic(const Instance& inst, const Matrix& demand, const std::vector<double>& setup,
                                    const SearchConfig& cfg = {}) {
  detail::check_size(inst, cfg);
  const std::size_t n = inst.size();
  if (demand.size() != n || setup.size() != n) throw InputError("solve_deterministic: dimension mismatch");
  const auto masks = enumerate_hub_masks(n, inst.capacities, demand.sum(), cfg.enable_pruning);
  auto bound = [&](HubMask m) {
    return uncapacitated_flow_cost(inst, mask_to_hubset(m, n), demand) + detail::mask_setup(setup, m);
  };
  auto score = [&](HubMask m) -> std::optional<double> {
    const auto r = solve_allocation(inst, mask_to_hubset(m, n), demand);
    if (r.status != SolveStatus::optimal) return std::nullopt;
    return r.flow_cost + detail::mask_setup(setup, m);
  };
  const auto best = detail::bounded_min(masks, bound, score, cfg);
  if (!best) return detail::infeasible_solution(n);
  const HubSet hubs = mask_to_hubset(best->mask, n);
  return detail::make_solution(hubs, solve_allocation(inst, hubs, demand), setup_cost(hubs, setup));
}

namespace detail {

inline std::optional<Scored> scenario_search(const std::vector<HubMask>& masks,
                                             const std::vector<double>& unc, const std::vector<double>& setup,
                                             FlowTable& flows, const SearchConfig& cfg) {
  std::unordered_map<HubMask, std::size_t> pos;
  for (std::size_t i = 0; i < masks.size(); ++i) pos.emplace(masks[i], i);
  auto bound = [&](HubMask m) { return unc[pos.at(m)] + mask_setup(setup, m); };
  auto score = [&](HubMask m) -> std::optional<double> {
    const auto f = flows.get(m);
    if (!f) return std::nullopt;
    return *f + mask_setup(setup, m);
  };
  return bounded_min(masks, bound, score, cfg);
}

inline std::vector<double> uncapacitated_table(const Instance& inst, const std::vector<HubMask>& masks,
                                               const Matrix& demand) {
  std::vector<double> out(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i)
    out[i] = uncapacitated_flow_cost(inst, mask_to_hubset(masks[i], inst.size()), demand);
  return out;
}

}  // namespace detail

/// Z*_{s'}: expected flow cost over the demand scenarios (capacity enforced
/// in each) plus setup cost under setup scenario `setup_index`.
inline Solution solve_scenario(const Instance& inst, std::size_t setup_index, const SearchConfig& cfg = {}) {
  detail::check_size(inst, cfg);
  if (setup_index >= inst.setup_scenarios.size()) throw InputError("setup scenario index out of range");
  const std::size_t n = inst.size();
  const auto& setup = inst.setup_scenarios[setup_index];
  const auto masks = enumerate_hub_masks(n, inst.capacities, max_total_demand(inst), cfg.enable_pruning);
  std::vector<double> unc;
  if (cfg.enable_pruning) unc = detail::uncapacitated_table(inst, masks, expected_demand(inst));
  else unc.assign(masks.size(), 0.0);
  detail::FlowTable flows(inst);
  const auto best = detail::scenario_search(masks, unc, setup, flows, cfg);
  if (!best) return detail::infeasible_solution(n);
  const HubSet hubs = mask_to_hubset(best->mask, n);
  return detail::make_solution(hubs, solve_allocation_multi(inst, hubs), setup_cost(hubs, setup));
}

struct RegretReport {
  std::vector<double> scenario_optima;      // Z*_{s'}
  std::vector<HubSet> scenario_hubs;        // argmin of each scenario model
  std::vector<double> chosen_setup_costs;   // setup cost of the chosen y under s'
  std::vector<double> regrets;              // R_{s'}
  double max_regret = 0.0;                  // R
  Solution solution;
  std::string diagnostic;
};

/// Minimax regret over the setup scenarios.
///
/// For fixed y every R_{s'} shares the same flow term, so
///   min_x max_{s'} R_{s'} = minFlow(y) + max_{s'} (setup_{s'}(y) - Z*_{s'})
/// and the regret of y needs one allocation LP.
inline RegretReport solve_minimax_regret(const Instance& inst, const SearchConfig& cfg = {}) {
  detail::check_size(inst, cfg);
  if (inst.setup_scenarios.empty()) throw InputError("minimax regret needs at least one setup scenario");
  if (inst.demand_scenarios.empty()) throw InputError("minimax regret needs at least one demand scenario");
  const std::size_t n = inst.size();
  const std::size_t ns = inst.setup_scenarios.size();
  RegretReport rep;
  rep.solution = detail::infeasible_solution(n);

  const auto masks = enumerate_hub_masks(n, inst.capacities, max_total_demand(inst), cfg.enable_pruning);
  std::vector<double> unc;
  if (cfg.enable_pruning) unc = detail::uncapacitated_table(inst, masks, expected_demand(inst));
  else unc.assign(masks.size(), 0.0);
  detail::FlowTable flows(inst);

  for (std::size_t t = 0; t < ns; ++t) {
    const auto best = detail::scenario_search(masks, unc, inst.setup_scenarios[t], flows, cfg);
    if (!best) {
      double cap = 0.0;
      for (double g : inst.capacities) cap += g;
      std::size_t worst = 0;
      for (std::size_t s = 1; s < inst.demand_scenarios.size(); ++s)
        if (inst.demand_scenarios[s].demand.sum() > inst.demand_scenarios[worst].demand.sum()) worst = s;
      rep.diagnostic = "scenario model for setup scenario " + std::to_string(t + 1) +
                       " is infeasible; binding demand scenario " + std::to_string(worst + 1) + " (total demand " +
                       detail::fmt_num(inst.demand_scenarios[worst].demand.sum()) + ", total capacity " +
                       detail::fmt_num(cap) + ")";
      return rep;
    }
    rep.scenario_optima.push_back(best->objective);
    rep.scenario_hubs.push_back(mask_to_hubset(best->mask, n));
  }

  auto max_excess = [&](HubMask m) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < ns; ++t)
      worst = std::max(worst, detail::mask_setup(inst.setup_scenarios[t], m) - rep.scenario_optima[t]);
    return worst;
  };
  std::unordered_map<HubMask, std::size_t> pos;
  for (std::size_t i = 0; i < masks.size(); ++i) pos.emplace(masks[i], i);
  auto bound = [&](HubMask m) { return unc[pos.at(m)] + max_excess(m); };
  auto score = [&](HubMask m) -> std::optional<double> {
    const auto f = flows.get(m);
    if (!f) return std::nullopt;
    return *f + max_excess(m);
  };
  const auto best = detail::bounded_min(masks, bound, score, cfg);
  if (!best) {
    rep.diagnostic = "no hub set is feasible for every demand scenario";
    return rep;
  }

  const HubSet hubs = mask_to_hubset(best->mask, n);
  const auto alloc = solve_allocation_multi(inst, hubs);
  Solution sol = detail::make_solution(hubs, alloc, setup_cost(hubs, mean_setup(inst)));
  for (std::size_t t = 0; t < ns; ++t) {
    const double f = setup_cost(hubs, inst.setup_scenarios[t]);
    rep.chosen_setup_costs.push_back(f);
    rep.regrets.push_back(alloc.flow_cost + f - rep.scenario_optima[t]);
  }
  rep.max_regret = *std::max_element(rep.regrets.begin(), rep.regrets.end());
  sol.objective = rep.max_regret;
  sol.per_scenario_regret = rep.regrets;
  sol.max_regret = rep.max_regret;
  rep.solution = std::move(sol);
  return rep;
}

}  // namespace hubloc
