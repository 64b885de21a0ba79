// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Cardinality-constrained quadratic binary selection:
//
//   maximize   sum_i u_i y_i + lambda * sum_{i<j} b_ij y_i y_j
//   subject to sum_i y_i = k,  y in {0,1}^n
//
// Three solvers share one objective routine so that their values are
// bit-comparable: an enumeration oracle, a best-first branch-and-bound, and a
// greedy + 1-swap heuristic for pools too large for exact search.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "groupinf/error.hpp"

namespace groupinf {

// Dense row-major matrix. Only what the score code needs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix square(std::size_t n) { return Matrix(n, n); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Validated unary vector and symmetric, zero-diagonal pairwise matrix.
class ScoreSet {
 public:
  ScoreSet() = default;

  // Throws ValidationError on shape mismatch, asymmetry, nonzero diagonal or
  // non-finite entries. Nothing is repaired; see symmetrize().
  static ScoreSet create(std::vector<double> unary, Matrix binary) {
    const std::size_t n = unary.size();
    detail::require(n >= 1, "score set: empty candidate pool");
    detail::require(binary.rows() == n && binary.cols() == n,
                    "score set: binary matrix is " +
                        std::to_string(binary.rows()) + "x" +
                        std::to_string(binary.cols()) + ", expected " +
                        std::to_string(n) + "x" + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      detail::require(std::isfinite(unary[i]),
                      "score set: non-finite unary score at " + std::to_string(i));
      for (std::size_t j = 0; j < n; ++j) {
        detail::require(std::isfinite(binary(i, j)),
                        "score set: non-finite binary score at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
      detail::require(binary(i, i) == 0.0,
                      "score set: nonzero diagonal at " + std::to_string(i));
      for (std::size_t j = i + 1; j < n; ++j) {
        detail::require(binary(i, j) == binary(j, i),
                        "score set: binary matrix not symmetric at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
    ScoreSet s;
    s.unary_ = std::move(unary);
    s.binary_ = std::move(binary);
    return s;
  }

  std::size_t size() const { return unary_.size(); }
  std::span<const double> unary() const { return unary_; }
  const Matrix& binary() const { return binary_; }
  double u(std::size_t i) const { return unary_[i]; }
  double b(std::size_t i, std::size_t j) const { return binary_(i, j); }

 private:
  std::vector<double> unary_;
  Matrix binary_;
};

// (B + B^T) / 2 with the diagonal cleared.
inline Matrix symmetrize(const Matrix& m) {
  detail::require(m.rows() == m.cols(), "symmetrize: matrix is not square");
  Matrix out = Matrix::square(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.rows(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

// Z-score the unary vector and the off-diagonal binary entries separately.
// Constant inputs map to zero. Never applied implicitly.
inline ScoreSet zscore_normalize(const ScoreSet& s) {
  const std::size_t n = s.size();
  auto standardize = [](std::vector<double>& v) {
    if (v.empty()) return;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / v.size());
    for (double& x : v) x = sd > 0.0 ? (x - mean) / sd : 0.0;
  };
  std::vector<double> u(s.unary().begin(), s.unary().end());
  standardize(u);
  std::vector<double> off;
  off.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) off.push_back(s.b(i, j));
  standardize(off);
  Matrix b = Matrix::square(n);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      b(i, j) = off[idx];
      b(j, i) = off[idx];
      ++idx;
    }
  }
  return ScoreSet::create(std::move(u), std::move(b));
}

struct SelectionProblem {
  ScoreSet scores;
  std::size_t k = 1;
  double lambda = 1.0;

  void validate() const {
    detail::require(k >= 1 && k <= scores.size(),
                    "selection problem: k=" + std::to_string(k) +
                        " outside [1, " + std::to_string(scores.size()) + "]");
    detail::require(std::isfinite(lambda) && lambda >= 0.0,
                    "selection problem: lambda must be finite and >= 0");
  }
};

enum class Strategy { kAuto, kExact, kGreedy };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kAuto:
      return "auto";
    case Strategy::kExact:
      return "exact";
    case Strategy::kGreedy:
      return "greedy";
  }
  return "auto";
}

inline Strategy parse_strategy(std::string_view name) {
  if (name == "auto") return Strategy::kAuto;
  if (name == "exact") return Strategy::kExact;
  if (name == "greedy") return Strategy::kGreedy;
  throw ValidationError("unknown solver strategy '" + std::string(name) +
                        "' (expected auto, exact or greedy)");
}

struct Selection {
  std::vector<std::size_t> indices;  // sorted ascending
  double objective = 0.0;
  Strategy strategy = Strategy::kExact;  // which solver produced it
  std::uint64_t nodes = 0;               // branch-and-bound nodes expanded
};

struct SolverLimits {
  std::uint64_t enumeration_cap = 10'000'000;  // brute_force refuses above
  std::size_t auto_max_n = 40;                 // auto tries exact up to here
  std::uint64_t auto_max_subsets = 1'000'000;  // ... or when C(n,k) is small
  std::uint64_t auto_node_budget = 200'000;    // then falls back to greedy
  std::uint64_t exact_node_budget = 50'000'000;
};

// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t count_subsets(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    // c * (n - k + i) / i stays exact because c*(n-k+i) is divisible by i.
    const std::uint64_t num = n - k + i;
    if (c > kMax / num) return kMax;
    c = c * num / i;
  }
  return c;
}

namespace detail {

inline void check_indices(const SelectionProblem& p,
                          std::span<const std::size_t> indices) {
  require(indices.size() == p.k, "objective: expected " + std::to_string(p.k) +
                                     " indices, got " +
                                     std::to_string(indices.size()));
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    require(sorted[a] < p.scores.size(),
            "objective: index " + std::to_string(sorted[a]) + " out of range");
    require(a == 0 || sorted[a] != sorted[a - 1],
            "objective: duplicate index " + std::to_string(sorted[a]));
  }
}

// The single arithmetic path for the objective: unary sum in the given
// order, pair sum in (a, b) lexicographic order, then combined.
inline double objective_unchecked(const ScoreSet& s, double lambda,
                                  std::span<const std::size_t> idx) {
  double unary = 0.0;
  for (std::size_t i : idx) unary += s.u(i);
  double pairs = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) pairs += s.b(idx[a], idx[b]);
  return unary + lambda * pairs;
}

// Preferred over the incumbent: strictly larger, or equal and
// lexicographically smaller.
inline bool better(double obj, std::span<const std::size_t> idx, double inc_obj,
                   std::span<const std::size_t> inc_idx) {
  if (obj != inc_obj) return obj > inc_obj;
  return std::lexicographical_compare(idx.begin(), idx.end(), inc_idx.begin(),
                                      inc_idx.end());
}

inline double magnitude(const SelectionProblem& p) {
  double umax = 0.0, bmax = 0.0;
  const std::size_t n = p.scores.size();
  for (std::size_t i = 0; i < n; ++i) {
    umax = std::max(umax, std::abs(p.scores.u(i)));
    for (std::size_t j = i + 1; j < n; ++j)
      bmax = std::max(bmax, std::abs(p.scores.b(i, j)));
  }
  const double k = static_cast<double>(p.k);
  return k * umax + p.lambda * bmax * k * (k - 1) / 2.0;
}

inline Selection full_selection(const SelectionProblem& p, Strategy strategy) {
  Selection sel;
  sel.indices.resize(p.scores.size());
  std::iota(sel.indices.begin(), sel.indices.end(), std::size_t{0});
  sel.objective = objective_unchecked(p.scores, p.lambda, sel.indices);
  sel.strategy = strategy;
  return sel;
}

}  // namespace detail

inline double objective_value(const SelectionProblem& p,
                              std::span<const std::size_t> indices) {
  p.validate();
  detail::check_indices(p, indices);
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  return detail::objective_unchecked(p.scores, p.lambda, sorted);
}

// Enumerates every k-subset in lexicographic order. Verification oracle.
inline Selection brute_force(const SelectionProblem& p,
                             std::uint64_t cap = SolverLimits{}.enumeration_cap) {
  p.validate();
  const std::size_t n = p.scores.size();
  const std::uint64_t total = count_subsets(n, p.k);
  if (total > cap) {
    throw BudgetExceededError("brute_force: C(" + std::to_string(n) + "," +
                              std::to_string(p.k) + ") exceeds enumeration cap " +
                              std::to_string(cap));
  }
  std::vector<std::size_t> comb(p.k);
  std::iota(comb.begin(), comb.end(), std::size_t{0});
  Selection best;
  best.strategy = Strategy::kExact;
  best.indices = comb;
  best.objective = detail::objective_unchecked(p.scores, p.lambda, comb);
  while (true) {
    // Advance to the next combination in lexicographic order.
    std::size_t pos = p.k;
    while (pos > 0 && comb[pos - 1] == n - p.k + pos - 1) --pos;
    if (pos == 0) break;
    ++comb[pos - 1];
    for (std::size_t q = pos; q < p.k; ++q) comb[q] = comb[q - 1] + 1;
    const double obj = detail::objective_unchecked(p.scores, p.lambda, comb);
    if (obj > best.objective) {
      best.objective = obj;
      best.indices = comb;
    }
  }
  return best;
}

// Greedy construction from the best unary candidate, then 1-swap local
// search to a local optimum. Ties go to the lowest index.
inline Selection solve_greedy(const SelectionProblem& p) {
  p.validate();
  const ScoreSet& s = p.scores;
  const std::size_t n = s.size();
  if (p.k == n) return detail::full_selection(p, Strategy::kGreedy);

  std::vector<char> in(n, 0);
  std::vector<double> pair_gain(n, 0.0);  // sum of b_ij over selected j
  std::vector<std::size_t> chosen;
  chosen.reserve(p.k);

  auto add = [&](std::size_t c) {
    in[c] = 1;
    chosen.push_back(c);
    for (std::size_t i = 0; i < n; ++i) pair_gain[i] += s.b(i, c);
  };

  while (chosen.size() < p.k) {
    std::size_t best = n;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (in[i]) continue;
      const double g = s.u(i) + p.lambda * pair_gain[i];
      if (g > best_gain) {
        best_gain = g;
        best = i;
      }
    }
    add(best);
  }

  const double tol = 1e-12 * (1.0 + detail::magnitude(p));
  const std::size_t max_swaps = 64 * n * p.k;
  for (std::size_t iter = 0; iter < max_swaps; ++iter) {
    double best_delta = tol;
    std::size_t best_out = n, best_in = n;
    for (std::size_t a = 0; a < chosen.size(); ++a) {
      const std::size_t out = chosen[a];
      const double out_gain = s.u(out) + p.lambda * pair_gain[out];
      for (std::size_t c = 0; c < n; ++c) {
        if (in[c]) continue;
        const double in_gain = s.u(c) + p.lambda * (pair_gain[c] - s.b(c, out));
        const double delta = in_gain - out_gain;
        if (delta > best_delta) {
          best_delta = delta;
          best_out = a;
          best_in = c;
        }
      }
    }
    if (best_in == n) break;
    const std::size_t out = chosen[best_out];
    in[out] = 0;
    in[best_in] = 1;
    chosen[best_out] = best_in;
    for (std::size_t i = 0; i < n; ++i) pair_gain[i] += s.b(i, best_in) - s.b(i, out);
  }

  Selection sel;
  sel.indices = std::move(chosen);
  std::sort(sel.indices.begin(), sel.indices.end());
  sel.objective = detail::objective_unchecked(s, p.lambda, sel.indices);
  sel.strategy = Strategy::kGreedy;
  return sel;
}

// Best-first branch-and-bound over include/exclude decisions taken in index
// order. A node fixes candidates [0, pos); with r slots left, the bound is
//
//   f(S) + sum of the r largest  u_i + lambda * (sum_{j in S} b_ij
//                                   + 1/2 * sum of r-1 largest b_ij, j >= pos)
//
// over i >= pos, which is admissible since each omitted pair is counted at
// most twice by its own rows' maxima. Nodes are only discarded when their
// bound is strictly below the incumbent (up to rounding), so every optimal
// subset stays reachable and the lexicographic tie-break matches
// brute_force.
inline Selection solve_exact(const SelectionProblem& p,
                             std::uint64_t node_budget = SolverLimits{}.exact_node_budget) {
  p.validate();
  const ScoreSet& s = p.scores;
  const std::size_t n = s.size();
  const std::size_t k = p.k;
  if (k == n) return detail::full_selection(p, Strategy::kExact);

  Selection incumbent = solve_greedy(p);
  incumbent.strategy = Strategy::kExact;
  const double tol = 1e-11 * (1.0 + detail::magnitude(p));

  // Row-wise neighbours sorted by descending b_ij (ties by index).
  std::vector<std::vector<std::uint32_t>> neighbours(n);
  if (p.lambda > 0.0 && k > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& nb = neighbours[i];
      nb.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) nb.push_back(static_cast<std::uint32_t>(j));
      std::stable_sort(nb.begin(), nb.end(), [&](std::uint32_t a, std::uint32_t b) {
        return s.b(i, a) > s.b(i, b);
      });
    }
  }

  struct Node {
    double bound;
    double base;  // objective of `chosen`
    std::uint64_t id;
    std::uint32_t pos;
    std::vector<std::uint32_t> chosen;
  };
  struct Order {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound < b.bound;
      return a.id > b.id;
    }
  };

  std::vector<double> gains(n);
  auto bound_of = [&](const Node& nd) {
    const std::size_t r = k - nd.chosen.size();
    gains.clear();
    for (std::size_t i = nd.pos; i < n; ++i) {
      double pair = 0.0;
      for (std::uint32_t j : nd.chosen) pair += s.b(i, j);
      if (p.lambda > 0.0 && r > 1) {
        double top = 0.0;
        std::size_t taken = 0;
        for (std::uint32_t j : neighbours[i]) {
          if (j < nd.pos) continue;
          top += s.b(i, j);
          if (++taken == r - 1) break;
        }
        pair += 0.5 * top;
      }
      gains.push_back(s.u(i) + p.lambda * pair);
    }
    std::nth_element(gains.begin(), gains.begin() + (r - 1), gains.end(),
                     std::greater<>());
    double sum = 0.0;
    for (std::size_t a = 0; a < r; ++a) sum += gains[a];
    return nd.base + sum;
  };

  std::vector<std::size_t> leaf;
  auto consider_leaf = [&](const std::vector<std::uint32_t>& chosen,
                           std::size_t fill_from) {
    leaf.assign(chosen.begin(), chosen.end());
    for (std::size_t i = fill_from; i < n; ++i) leaf.push_back(i);
    const double obj = detail::objective_unchecked(s, p.lambda, leaf);
    if (detail::better(obj, leaf, incumbent.objective, incumbent.indices)) {
      incumbent.objective = obj;
      incumbent.indices = leaf;
    }
  };

  std::priority_queue<Node, std::vector<Node>, Order> open;
  std::uint64_t next_id = 0;
  Node root{0.0, 0.0, next_id++, 0, {}};
  root.bound = bound_of(root);
  open.push(std::move(root));

  std::uint64_t expanded = 0;
  while (!open.empty()) {
    if (open.top().bound < incumbent.objective - tol) break;
    Node nd = open.top();
    open.pop();
    if (++expanded > node_budget) {
      throw BudgetExceededError("solve_exact: node budget " +
                                std::to_string(node_budget) + " exhausted (n=" +
                                std::to_string(n) + ", k=" + std::to_string(k) + ")");
    }
    const std::uint32_t i = nd.pos;
    const std::size_t remaining_after = n - i - 1;

    // Include candidate i.
    {
      Node child{0.0, 0.0, next_id++, i + 1, nd.chosen};
      double pair = 0.0;
      for (std::uint32_t j : nd.chosen) pair += s.b(i, j);
      child.base = nd.base + s.u(i) + p.lambda * pair;
      child.chosen.push_back(i);
      const std::size_t r = k - child.chosen.size();
      if (r == 0) {
        consider_leaf(child.chosen, n);
      } else if (remaining_after == r) {
        consider_leaf(child.chosen, i + 1);
      } else {
        child.bound = bound_of(child);
        if (child.bound >= incumbent.objective - tol) open.push(std::move(child));
      }
    }
    // Exclude candidate i.
    {
      const std::size_t r = k - nd.chosen.size();
      if (remaining_after >= r) {
        Node child{0.0, nd.base, next_id++, i + 1, std::move(nd.chosen)};
        if (remaining_after == r) {
          consider_leaf(child.chosen, i + 1);
        } else {
          child.bound = bound_of(child);
          if (child.bound >= incumbent.objective - tol) open.push(std::move(child));
        }
      }
    }
  }
  incumbent.nodes = expanded;
  return incumbent;
}

// Dispatches on problem size. kAuto tries exact search when the pool is small
// (n <= auto_max_n or C(n,k) <= auto_max_subsets) within auto_node_budget,
// and otherwise runs the greedy heuristic. The returned strategy records
// which solver produced the answer.
inline Selection solve(const SelectionProblem& p, Strategy strategy = Strategy::kAuto,
                       const SolverLimits& limits = {}) {
  p.validate();
  const std::size_t n = p.scores.size();
  if (p.k == n) {
    return detail::full_selection(
        p, strategy == Strategy::kGreedy ? Strategy::kGreedy : Strategy::kExact);
  }
  switch (strategy) {
    case Strategy::kExact:
      return solve_exact(p, limits.exact_node_budget);
    case Strategy::kGreedy:
      return solve_greedy(p);
    case Strategy::kAuto:
      break;
  }
  if (n <= limits.auto_max_n || count_subsets(n, p.k) <= limits.auto_max_subsets) {
    try {
      return solve_exact(p, limits.auto_node_budget);
    } catch (const BudgetExceededError&) {
      // fall through to greedy
    }
  }
  return solve_greedy(p);
}

}  // namespace groupinf
