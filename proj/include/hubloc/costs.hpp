#pragma once

#include <limits>
#include <vector>

#include "hubloc/core.hpp"

namespace hubloc {

/// Per-unit route cost C_ijkm = beta*d_ik + alpha*d_km + delta*d_mj.
///
/// Values are computed on demand. For small instances (n <= cache_limit) the
/// full n^4 table is materialized at construction; both paths evaluate the
/// same expression, so cached and uncached results are bit-identical.
class CostOracle {
 public:
  static constexpr std::size_t kDefaultCacheLimit = 20;

  explicit CostOracle(const Instance& inst, std::size_t cache_limit = kDefaultCacheLimit)
      : inst_(&inst), n_(inst.size()) {
    if (n_ <= cache_limit) {
      cache_.resize(n_ * n_ * n_ * n_);
      for (NodeIndex i = 0; i < n_; ++i)
        for (NodeIndex j = 0; j < n_; ++j)
          for (NodeIndex k = 0; k < n_; ++k)
            for (NodeIndex m = 0; m < n_; ++m) cache_[index(i, j, k, m)] = compute(i, j, k, m);
    }
  }

  std::size_t size() const { return n_; }
  bool cached() const { return !cache_.empty(); }

  double operator()(NodeIndex i, NodeIndex j, NodeIndex k, NodeIndex m) const {
    if (i >= n_ || j >= n_ || k >= n_ || m >= n_) throw InputError("unit_cost: node index out of range");
    return cached() ? cache_[index(i, j, k, m)] : compute(i, j, k, m);
  }

  const Instance& instance() const { return *inst_; }

 private:
  std::size_t index(NodeIndex i, NodeIndex j, NodeIndex k, NodeIndex m) const {
    return ((i * n_ + j) * n_ + k) * n_ + m;
  }
  double compute(NodeIndex i, NodeIndex j, NodeIndex k, NodeIndex m) const {
    const auto& d = inst_->distances;
    const auto& c = inst_->coefficients;
    return c.beta * d(i, k) + c.alpha * d(k, m) + c.delta * d(m, j);
  }

  const Instance* inst_;
  std::size_t n_;
  std::vector<double> cache_;
};

inline double unit_cost(const Instance& inst, NodeIndex i, NodeIndex j, NodeIndex k, NodeIndex m) {
  const std::size_t n = inst.size();
  if (i >= n || j >= n || k >= n || m >= n) throw InputError("unit_cost: node index out of range");
  const auto& d = inst.distances;
  const auto& c = inst.coefficients;
  return c.beta * d(i, k) + c.alpha * d(k, m) + c.delta * d(m, j);
}

/// min over open m of C_ijkm for every open first hub k, with its argmin.
///
/// The inner minimum alpha*d_km + delta*d_mj does not depend on the origin,
/// so only an (k, j) table is stored.
class ReducedCost {
 public:
  ReducedCost(const Instance& inst, const HubSet& hubs) : inst_(&inst), hubs_(hubs), n_(inst.size()) {
    if (hubs.size() != n_) throw InputError("reduce: hub set size mismatch");
    if (hubs.empty()) throw InputError("reduce: empty hub set");
    const auto& d = inst.distances;
    const auto& c = inst.coefficients;
    tail_.assign(n_ * n_, std::numeric_limits<double>::infinity());
    second_.assign(n_ * n_, n_);
    const auto open = hubs.indices();
    for (NodeIndex k : open) {
      for (NodeIndex j = 0; j < n_; ++j) {
        double best = std::numeric_limits<double>::infinity();
        NodeIndex arg = n_;
        // ascending m with strict '<' keeps the lowest index on ties
        for (NodeIndex m : open) {
          const double v = c.alpha * d(k, m) + c.delta * d(m, j);
          if (v < best) {
            best = v;
            arg = m;
          }
        }
        tail_[k * n_ + j] = best;
        second_[k * n_ + j] = arg;
      }
    }
  }

  const HubSet& hubs() const { return hubs_; }

  /// Reduced cost for (i, j, k); k must be open.
  double cost(NodeIndex i, NodeIndex j, NodeIndex k) const {
    check(i, j, k);
    return inst_->coefficients.beta * inst_->distances(i, k) + tail_[k * n_ + j];
  }

  NodeIndex second_hub(NodeIndex i, NodeIndex j, NodeIndex k) const {
    check(i, j, k);
    return second_[k * n_ + j];
  }

  /// min over open (k, m) of C_ijkm; the uncapacitated per-unit cost.
  double best_route(NodeIndex i, NodeIndex j) const {
    double best = std::numeric_limits<double>::infinity();
    for (NodeIndex k = 0; k < n_; ++k)
      if (hubs_.is_open(k)) best = std::min(best, cost(i, j, k));
    return best;
  }

 private:
  void check(NodeIndex i, NodeIndex j, NodeIndex k) const {
    if (i >= n_ || j >= n_ || k >= n_) throw InputError("reduced cost: node index out of range");
    if (!hubs_.is_open(k)) throw InputError("reduced cost: first hub " + std::to_string(k + 1) + " is not open");
  }

  const Instance* inst_;
  HubSet hubs_;
  std::size_t n_;
  std::vector<double> tail_;
  std::vector<NodeIndex> second_;
};

inline ReducedCost reduce(const Instance& inst, const HubSet& hubs) { return ReducedCost(inst, hubs); }

}  // namespace hubloc
