#pragma once

// Dense two-phase primal simplex.
//
// Rows are equilibrated by their largest coefficient and the objective by its
// largest cost before solving; reported values, duals and primal solutions
// are in the caller's original units.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hubloc/core.hpp"

namespace hubloc {

enum class RowSense { less_equal, equal, greater_equal };

struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;            // minimize c^T x
  std::vector<double> coefficients;         // row-major, rows x num_vars
  std::vector<RowSense> senses;
  std::vector<double> rhs;
  std::vector<double> upper;                // per variable; +inf when absent

  explicit LpProblem(std::size_t n = 0)
      : num_vars(n), objective(n, 0.0), upper(n, std::numeric_limits<double>::infinity()) {}

  std::size_t num_rows() const { return senses.size(); }

  double a(std::size_t r, std::size_t j) const { return coefficients[r * num_vars + j]; }

  /// Appends a row and returns its index.
  std::size_t add_row(const std::vector<double>& row, RowSense sense, double b) {
    if (row.size() != num_vars) throw InputError("add_row: expected " + std::to_string(num_vars) + " coefficients");
    coefficients.insert(coefficients.end(), row.begin(), row.end());
    senses.push_back(sense);
    rhs.push_back(b);
    return senses.size() - 1;
  }

  /// Sparse form of add_row.
  std::size_t add_sparse_row(const std::vector<std::pair<std::size_t, double>>& terms, RowSense sense, double b) {
    const std::size_t base = coefficients.size();
    coefficients.resize(base + num_vars, 0.0);
    for (auto [j, v] : terms) {
      if (j >= num_vars) throw InputError("add_sparse_row: variable index out of range");
      coefficients[base + j] += v;
    }
    senses.push_back(sense);
    rhs.push_back(b);
    return senses.size() - 1;
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> x;
  std::vector<double> duals;        // one per constraint row
  std::vector<double> bound_duals;  // one per variable; nonzero only for finite upper bounds
  std::size_t iterations = 0;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-9;
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-9;
  std::size_t bland_after = 5000;
  // 0 selects 10 * (rows + cols)^2 + 100.
  std::size_t max_iterations = 0;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  // Objective row is stored at index rows_; its rhs holds -value.
  double& cost(std::size_t c) { return at(rows_, c); }
  double cost(std::size_t c) const { return at(rows_, c); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const std::size_t w = cols_ + 1;
    double* prow = &t_[pr * w];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < w; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* row = &t_[r * w];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < w; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> t_;
};

}  // namespace detail

/// Solves min c^T x s.t. rows, 0 <= x <= upper.
inline LpResult solve_lp(const LpProblem& lp, const SimplexOptions& opt = {}) {
  const std::size_t n = lp.num_vars;
  if (lp.objective.size() != n || lp.upper.size() != n) throw InputError("solve_lp: objective/upper size mismatch");
  if (lp.coefficients.size() != lp.num_rows() * n || lp.rhs.size() != lp.num_rows())
    throw InputError("solve_lp: constraint dimension mismatch");
  for (double v : lp.objective)
    if (!std::isfinite(v)) throw InputError("solve_lp: non-finite objective coefficient");
  for (double v : lp.coefficients)
    if (!std::isfinite(v)) throw InputError("solve_lp: non-finite constraint coefficient");
  for (double v : lp.rhs)
    if (!std::isfinite(v)) throw InputError("solve_lp: non-finite right-hand side");
  for (double v : lp.upper)
    if (std::isnan(v) || v < 0.0) throw InputError("solve_lp: upper bounds must be >= 0");

  // Working rows: original constraints followed by finite upper bounds.
  struct WorkRow {
    std::vector<std::pair<std::size_t, double>> terms;
    RowSense sense;
    double b;
    double scale = 1.0;  // original = scale * working (before sign flip)
    double flip = 1.0;
    bool dropped = false;
  };
  std::vector<WorkRow> work;
  std::vector<std::size_t> bound_row(n, SIZE_MAX);
  LpResult res;
  res.duals.assign(lp.num_rows(), 0.0);
  res.bound_duals.assign(n, 0.0);

  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    WorkRow w{{}, lp.senses[r], lp.rhs[r]};
    for (std::size_t j = 0; j < n; ++j)
      if (lp.a(r, j) != 0.0) w.terms.emplace_back(j, lp.a(r, j));
    work.push_back(std::move(w));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(lp.upper[j])) {
      bound_row[j] = work.size();
      work.push_back(WorkRow{{{j, 1.0}}, RowSense::less_equal, lp.upper[j]});
    }
  }

  for (auto& w : work) {
    double mx = 0.0;
    for (auto& [j, v] : w.terms) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) {
      const bool ok = (w.sense == RowSense::less_equal && w.b >= -opt.feasibility_tolerance) ||
                      (w.sense == RowSense::greater_equal && w.b <= opt.feasibility_tolerance) ||
                      (w.sense == RowSense::equal && std::abs(w.b) <= opt.feasibility_tolerance);
      if (!ok) {
        res.status = LpStatus::infeasible;
        return res;
      }
      w.dropped = true;
      continue;
    }
    w.scale = mx;
    for (auto& [j, v] : w.terms) v /= mx;
    w.b /= mx;
    if (w.b < 0.0) {
      w.flip = -1.0;
      w.b = -w.b;
      for (auto& [j, v] : w.terms) v = -v;
      if (w.sense == RowSense::less_equal) w.sense = RowSense::greater_equal;
      else if (w.sense == RowSense::greater_equal) w.sense = RowSense::less_equal;
    }
  }

  // Column layout: structural | slack/surplus | artificial.
  std::vector<std::size_t> live;
  for (std::size_t r = 0; r < work.size(); ++r)
    if (!work[r].dropped) live.push_back(r);
  const std::size_t m = live.size();
  std::size_t n_slack = 0, n_art = 0;
  for (std::size_t r : live) {
    if (work[r].sense != RowSense::equal) ++n_slack;
    if (work[r].sense != RowSense::less_equal) ++n_art;
  }
  const std::size_t slack0 = n, art0 = n + n_slack, cols = n + n_slack + n_art;
  detail::Tableau T(m, cols);
  std::vector<std::size_t> basis(m);
  std::vector<std::size_t> id_col(m);  // +1 identity column of each row
  {
    std::size_t s = slack0, a = art0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& w = work[live[i]];
      for (auto& [j, v] : w.terms) T.at(i, j) = v;
      T.rhs(i) = w.b;
      if (w.sense == RowSense::less_equal) {
        T.at(i, s) = 1.0;
        basis[i] = id_col[i] = s++;
      } else {
        if (w.sense == RowSense::greater_equal) T.at(i, s++) = -1.0;
        T.at(i, a) = 1.0;
        basis[i] = id_col[i] = a++;
      }
    }
  }
  auto is_art = [&](std::size_t c) { return c >= art0; };

  double cscale = 0.0;
  for (double v : lp.objective) cscale = std::max(cscale, std::abs(v));
  if (cscale == 0.0) cscale = 1.0;

  const std::size_t max_iter = opt.max_iterations ? opt.max_iterations : 10 * (m + cols) * (m + cols) + 100;

  auto load_costs = [&](const std::vector<double>& c) {
    for (std::size_t j = 0; j <= cols; ++j) T.cost(j) = j < cols ? c[j] : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = c[basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) T.cost(j) -= cb * T.at(i, j);
    }
  };

  // Returns false when unbounded.
  auto run = [&](bool allow_art) -> bool {
    std::size_t phase_iter = 0;
    while (true) {
      if (res.iterations >= max_iter)
        throw NumericError("solve_lp: iteration limit " + std::to_string(max_iter) + " exceeded");
      const bool bland = phase_iter >= opt.bland_after;
      std::size_t enter = cols;
      double best = -opt.optimality_tolerance;
      for (std::size_t j = 0; j < cols; ++j) {
        if (!allow_art && is_art(j)) continue;
        const double d = T.cost(j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter == cols) return true;

      std::size_t leave = m;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const double a = T.at(i, enter);
        if (a <= opt.pivot_tolerance) continue;
        const double r = std::max(T.rhs(i), 0.0) / a;
        if (leave == m) {
          leave = i;
          ratio = r;
          continue;
        }
        // near-ties go to the lowest basic variable index
        const double eps = 1e-12 * (1.0 + ratio);
        if (r < ratio - eps || (r <= ratio + eps && basis[i] < basis[leave])) {
          leave = i;
          ratio = std::min(ratio, r);
        }
      }
      if (leave == m) return false;
      T.pivot(leave, enter);
      basis[leave] = enter;
      ++res.iterations;
      ++phase_iter;
      if (!std::isfinite(T.cost(cols)) || !std::isfinite(T.rhs(leave)))
        throw NumericError("solve_lp: non-finite value during pivoting");
    }
  };

  // Phase 1.
  if (n_art > 0) {
    std::vector<double> c1(cols, 0.0);
    for (std::size_t j = art0; j < cols; ++j) c1[j] = 1.0;
    load_costs(c1);
    run(true);
    const double infeas = -T.cost(cols);
    if (infeas > opt.feasibility_tolerance) {
      res.status = LpStatus::infeasible;
      return res;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_art(basis[i])) continue;
      std::size_t pc = cols;
      double big = opt.pivot_tolerance;
      for (std::size_t j = 0; j < art0; ++j)
        if (std::abs(T.at(i, j)) > big) {
          big = std::abs(T.at(i, j));
          pc = j;
        }
      if (pc < cols) {
        T.pivot(i, pc);
        basis[i] = pc;
      }
    }
  }

  // Phase 2.
  std::vector<double> c2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) c2[j] = lp.objective[j] / cscale;
  load_costs(c2);
  if (!run(false)) {
    res.status = LpStatus::unbounded;
    return res;
  }

  res.status = LpStatus::optimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = std::max(T.rhs(i), 0.0);
  double value = 0.0;
  for (std::size_t j = 0; j < n; ++j) value += lp.objective[j] * res.x[j];
  res.value = value;

  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = live[i];
    const double y = -T.cost(id_col[i]) * cscale * work[r].flip / work[r].scale;
    if (r < lp.num_rows()) {
      res.duals[r] = y;
    } else {
      for (std::size_t j = 0; j < n; ++j)
        if (bound_row[j] == r) res.bound_duals[j] = y;
    }
  }
  return res;
}

}  // namespace hubloc
