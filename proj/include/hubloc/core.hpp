#pragma once

// Domain types for the capacitated multiple-allocation hub location problem
// with scenario-based demand and setup-cost uncertainty.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <initializer_list>
#include <algorithm>
#include <vector>

namespace hubloc {

using NodeIndex = std::size_t;

/// Thrown for malformed input (bad indices, dimension mismatches, invalid
/// instances). Infeasibility is reported through status values, not this.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  const std::vector<double>& data() const { return data_; }

  double sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
  }

  Matrix& operator*=(double c) {
    for (double& v : data_) v *= c;
    return *this;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct CostCoefficients {
  double alpha = 1.0;  // hub-to-hub transfer
  double beta = 1.0;   // origin-to-first-hub collection
  double delta = 1.0;  // last-hub-to-destination distribution

  friend bool operator==(const CostCoefficients&, const CostCoefficients&) = default;
};

struct DemandScenario {
  double probability = 1.0;
  Matrix demand;  // W^s_ij

  friend bool operator==(const DemandScenario&, const DemandScenario&) = default;
};

/// One realization of every node's establishment cost.
using SetupScenario = std::vector<double>;

struct Instance {
  std::string name;
  std::vector<std::string> nodes;
  Matrix distances;
  std::vector<double> capacities;
  CostCoefficients coefficients;
  std::vector<DemandScenario> demand_scenarios;
  std::vector<SetupScenario> setup_scenarios;
  std::optional<NodeIndex> origin;

  std::size_t size() const { return nodes.size(); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Hub selection vector y.
class HubSet {
 public:
  HubSet() = default;
  explicit HubSet(std::size_t n) : open_(n, false) {}
  HubSet(std::size_t n, std::initializer_list<NodeIndex> hubs) : open_(n, false) {
    for (NodeIndex k : hubs) open_.at(k) = true;
  }

  static HubSet from_indices(std::size_t n, const std::vector<NodeIndex>& hubs) {
    HubSet h(n);
    for (NodeIndex k : hubs) {
      if (k >= n) throw InputError("hub index " + std::to_string(k) + " out of range");
      h.open_[k] = true;
    }
    return h;
  }

  std::size_t size() const { return open_.size(); }
  bool is_open(NodeIndex k) const { return open_[k]; }
  void set(NodeIndex k, bool v = true) { open_.at(k) = v; }
  bool empty() const {
    for (bool b : open_)
      if (b) return false;
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (bool b : open_) c += b ? 1 : 0;
    return c;
  }
  std::vector<NodeIndex> indices() const {
    std::vector<NodeIndex> out;
    for (NodeIndex k = 0; k < open_.size(); ++k)
      if (open_[k]) out.push_back(k);
    return out;
  }

  /// Lexicographic order on the sorted index vectors; {0,1,4} < {0,2}.
  friend bool lex_less(const HubSet& a, const HubSet& b) {
    auto ia = a.indices();
    auto ib = b.indices();
    return ia < ib;
  }

  friend bool operator==(const HubSet&, const HubSet&) = default;

 private:
  std::vector<bool> open_;
};

/// Compressed allocation: fraction routed through first hub k, with the
/// second hub fixed at the cheapest open m for (i, j, k).
struct AllocationPlan {
  struct Entry {
    NodeIndex origin;
    NodeIndex destination;
    NodeIndex first_hub;
    NodeIndex second_hub;
    double fraction;

    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::vector<Entry> entries;

  friend bool operator==(const AllocationPlan&, const AllocationPlan&) = default;
};

enum class SolveStatus { optimal, infeasible };

inline const char* to_string(SolveStatus s) {
  return s == SolveStatus::optimal ? "optimal" : "infeasible";
}

struct Solution {
  HubSet hub_set;
  AllocationPlan allocation;
  double flow_cost = 0.0;
  double setup_cost = 0.0;
  double objective = 0.0;
  std::optional<std::vector<double>> per_scenario_regret;
  std::optional<double> max_regret;
  SolveStatus status = SolveStatus::infeasible;

  friend bool operator==(const Solution&, const Solution&) = default;
};

struct Violation {
  std::string field;
  std::string index;
  std::string rule;

  std::string to_string() const { return field + "[" + index + "]: " + rule; }
};

constexpr double kProbabilityTolerance = 1e-9;

namespace detail {
inline std::string pair_str(std::size_t a, std::size_t b) {
  return std::to_string(a + 1) + "," + std::to_string(b + 1);
}
inline std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}
}  // namespace detail

/// Every broken instance invariant, with 1-based node indices in messages.
inline std::vector<Violation> validate_instance(const Instance& inst) {
  std::vector<Violation> out;
  const std::size_t n = inst.size();
  auto add = [&](std::string f, std::string i, std::string r) {
    out.push_back({std::move(f), std::move(i), std::move(r)});
  };

  if (n == 0) add("nodes", "-", "instance has no nodes");
  if (inst.distances.size() != n) {
    add("distances", "-", "dimension " + std::to_string(inst.distances.size()) + " != " + std::to_string(n));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (inst.distances(i, i) != 0.0) add("distances", detail::pair_str(i, i), "nonzero diagonal");
      for (std::size_t j = 0; j < n; ++j) {
        const double d = inst.distances(i, j);
        if (!std::isfinite(d) || d < 0.0) add("distances", detail::pair_str(i, j), "negative or non-finite distance");
        if (j > i && d != inst.distances(j, i)) add("distances", detail::pair_str(i, j), "asymmetric distance at (" + detail::pair_str(i, j) + ")");
      }
    }
  }

  if (inst.capacities.size() != n) {
    add("capacities", "-", "length " + std::to_string(inst.capacities.size()) + " != " + std::to_string(n));
  } else {
    for (std::size_t k = 0; k < n; ++k)
      if (!(inst.capacities[k] > 0.0) || !std::isfinite(inst.capacities[k]))
        add("capacities", std::to_string(k + 1), "capacity must be positive");
  }

  const auto& c = inst.coefficients;
  for (auto [label, v] : std::initializer_list<std::pair<const char*, double>>{{"alpha", c.alpha}, {"beta", c.beta}, {"delta", c.delta}})
    if (!(v >= 0.0) || !std::isfinite(v)) add("coefficients", label, "coefficient must be nonnegative");

  if (inst.demand_scenarios.empty()) add("demand_scenarios", "-", "at least one demand scenario required");
  double psum = 0.0;
  for (std::size_t s = 0; s < inst.demand_scenarios.size(); ++s) {
    const auto& sc = inst.demand_scenarios[s];
    const std::string si = std::to_string(s + 1);
    if (!(sc.probability >= 0.0)) add("demand_scenarios", si, "negative probability");
    psum += sc.probability;
    if (sc.demand.size() != n) {
      add("demand_scenarios", si, "demand dimension " + std::to_string(sc.demand.size()) + " != " + std::to_string(n));
      continue;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double w = sc.demand(i, j);
        if (!(w >= 0.0) || !std::isfinite(w)) add("demand_scenarios", si + ":" + detail::pair_str(i, j), "negative or non-finite demand");
        if (i == j && w != 0.0 && !(inst.origin && i == *inst.origin)) add("demand_scenarios", si + ":" + detail::pair_str(i, j), "nonzero diagonal demand");
        if (inst.origin && i != *inst.origin && w != 0.0)
          add("demand_scenarios", si + ":" + detail::pair_str(i, j), "demand outside the origin row");
      }
  }
  if (!inst.demand_scenarios.empty() && std::abs(psum - 1.0) > kProbabilityTolerance)
    add("demand_scenarios", "-", "probabilities sum " + detail::fmt_num(psum) + " != 1");

  if (inst.setup_scenarios.empty()) add("setup_scenarios", "-", "at least one setup scenario required");
  for (std::size_t t = 0; t < inst.setup_scenarios.size(); ++t) {
    const auto& f = inst.setup_scenarios[t];
    if (f.size() != n) {
      add("setup_scenarios", std::to_string(t + 1), "length " + std::to_string(f.size()) + " != " + std::to_string(n));
      continue;
    }
    for (std::size_t k = 0; k < n; ++k)
      if (!(f[k] >= 0.0) || !std::isfinite(f[k]))
        add("setup_scenarios", std::to_string(t + 1) + ":" + std::to_string(k + 1), "negative or non-finite setup cost");
  }

  if (inst.origin && *inst.origin >= n) add("origin", std::to_string(*inst.origin + 1), "origin index out of range");
  if (inst.nodes.size() != n) add("nodes", "-", "node list length mismatch");
  return out;
}

inline void require_valid(const Instance& inst) {
  auto v = validate_instance(inst);
  if (v.empty()) return;
  std::string msg = "invalid instance:";
  for (const auto& x : v) msg += "\n  " + x.to_string();
  throw InputError(msg);
}

/// Probability-weighted mean of the demand scenarios.
inline Matrix expected_demand(const Instance& inst) {
  Matrix out(inst.size());
  for (const auto& sc : inst.demand_scenarios) {
    if (sc.demand.size() != inst.size()) throw InputError("demand dimension mismatch");
    for (std::size_t i = 0; i < inst.size(); ++i)
      for (std::size_t j = 0; j < inst.size(); ++j) out(i, j) += sc.probability * sc.demand(i, j);
  }
  return out;
}

/// Arithmetic mean of the setup scenarios, node by node.
inline std::vector<double> mean_setup(const Instance& inst) {
  std::vector<double> out(inst.size(), 0.0);
  if (inst.setup_scenarios.empty()) return out;
  for (const auto& f : inst.setup_scenarios)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += f.at(k);
  for (double& v : out) v /= static_cast<double>(inst.setup_scenarios.size());
  return out;
}

inline double setup_cost(const HubSet& hubs, const std::vector<double>& setup) {
  double s = 0.0;
  for (NodeIndex k = 0; k < hubs.size(); ++k)
    if (hubs.is_open(k)) s += setup.at(k);
  return s;
}

inline double total_capacity(const Instance& inst, const HubSet& hubs) {
  double s = 0.0;
  for (NodeIndex k = 0; k < hubs.size(); ++k)
    if (hubs.is_open(k)) s += inst.capacities.at(k);
  return s;
}

/// Largest total demand over all demand scenarios.
inline double max_total_demand(const Instance& inst) {
  double m = 0.0;
  for (const auto& sc : inst.demand_scenarios) m = std::max(m, sc.demand.sum());
  return m;
}

/// "2,3" style 1-based listing.
inline std::string hub_list(const HubSet& h) {
  std::string s;
  for (NodeIndex k : h.indices()) {
    if (!s.empty()) s += ",";
    s += std::to_string(k + 1);
  }
  return s;
}

inline std::string hub_names(const Instance& inst, const HubSet& h) {
  std::string s;
  for (NodeIndex k : h.indices()) {
    if (!s.empty()) s += ",";
    s += inst.nodes.at(k);
  }
  return s;
}

}  // namespace hubloc
