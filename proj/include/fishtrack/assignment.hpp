#pragma once

// Maximum-weight bipartite assignment (Kuhn-Munkres with row/column
// potentials). Rectangular inputs are padded to square with zero weight.
// Among equally optimal assignments the lexicographically smallest
// row->column vector is returned so that callers get stable results.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fishtrack/errors.hpp"

namespace fishtrack {

using WeightMatrix = Eigen::MatrixXd;

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), sorted by row
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;

  double total_weight(const WeightMatrix& weights) const {
    double sum = 0.0;
    for (const auto& [r, c] : pairs) sum += weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return sum;
  }
};

namespace detail {

// Solves min-cost perfect assignment on a square cost matrix. Returns
// row_to_col plus the final potentials (reduced cost c - u - v >= 0).
struct SquareSolution {
  std::vector<std::size_t> row_to_col;
  std::vector<double> u;
  std::vector<double> v;
};

inline SquareSolution solve_square_min_cost(const Eigen::MatrixXd& cost) {
  const std::size_t n = static_cast<std::size_t>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based internal arrays; index 0 is the virtual source column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  SquareSolution out;
  out.row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.row_to_col[owner[j] - 1] = j - 1;
  out.u.assign(u.begin() + 1, u.end());
  out.v.assign(v.begin() + 1, v.end());
  return out;
}

// Every optimal assignment is a perfect matching on the zero-reduced-cost
// ("tight") edges. Walk rows in order and pull each row onto its smallest
// tight column for which the remaining rows can still be re-matched.
inline void make_lexicographic(const Eigen::MatrixXd& cost, SquareSolution& sol, double tol) {
  const std::size_t n = sol.row_to_col.size();
  auto tight = [&](std::size_t r, std::size_t c) {
    return cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) - sol.u[r] - sol.v[c] <= tol;
  };
  std::vector<std::size_t> col_owner(n);
  for (std::size_t r = 0; r < n; ++r) col_owner[sol.row_to_col[r]] = r;

  std::vector<char> reaches(n);             // row can hand over its column and reach `target`
  std::vector<std::size_t> next_row(n);     // successor on that row's path (n = takes target)
  std::vector<std::size_t> queue;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t target = sol.row_to_col[i];
    // Reverse search over free rows (> i): a row reaches `target` if it is
    // tight on `target` or on the column of a row that already reaches it.
    std::fill(reaches.begin(), reaches.end(), 0);
    queue.clear();
    for (std::size_t r = i + 1; r < n; ++r) {
      if (tight(r, target)) {
        reaches[r] = 1;
        next_row[r] = n;
        queue.push_back(r);
      }
    }
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t freed = sol.row_to_col[queue[q]];
      for (std::size_t r = i + 1; r < n; ++r) {
        if (!reaches[r] && tight(r, freed)) {
          reaches[r] = 1;
          next_row[r] = queue[q];
          queue.push_back(r);
        }
      }
    }

    for (std::size_t j = 0; j < target; ++j) {
      const std::size_t start = col_owner[j];
      if (start <= i || !reaches[start] || !tight(i, j)) continue;
      // Shift along the path: each row takes its successor's column, the
      // last one takes `target`, and row i takes j.
      for (std::size_t r = start; r != n; r = next_row[r]) {
        const std::size_t nr = next_row[r];
        const std::size_t take = nr == n ? target : sol.row_to_col[nr];
        sol.row_to_col[r] = take;
        col_owner[take] = r;
      }
      sol.row_to_col[i] = j;
      col_owner[j] = i;
      break;
    }
  }
}

}  // namespace detail

/// Optimal row->column map for the square-padded problem; -1 marks a row
/// assigned to a padding column.
inline std::vector<std::ptrdiff_t> solve_max_weight(const WeightMatrix& weights) {
  const auto rows = static_cast<std::size_t>(weights.rows());
  const auto cols = static_cast<std::size_t>(weights.cols());
  if (rows == 0 || cols == 0) return std::vector<std::ptrdiff_t>(rows, -1);
  if (!weights.allFinite()) throw InvalidInput("assignment weights must be finite");

  const std::size_t n = std::max(rows, cols);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  cost.topLeftCorner(weights.rows(), weights.cols()) = -weights;

  auto sol = detail::solve_square_min_cost(cost);
  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  detail::make_lexicographic(cost, sol, 1e-9 * scale);

  std::vector<std::ptrdiff_t> out(rows, -1);
  for (std::size_t r = 0; r < rows; ++r) {
    if (sol.row_to_col[r] < cols) out[r] = static_cast<std::ptrdiff_t>(sol.row_to_col[r]);
  }
  return out;
}

/// Maximum-total-weight one-to-one assignment. Pairs whose weight is
/// <= min_weight are dropped after solving and reported as unmatched.
inline Assignment assign_max_weight(const WeightMatrix& weights, double min_weight) {
  const auto rows = static_cast<std::size_t>(weights.rows());
  const auto cols = static_cast<std::size_t>(weights.cols());
  const auto row_to_col = solve_max_weight(weights);

  Assignment result;
  std::vector<char> col_used(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto c = row_to_col[r];
    if (c >= 0 && weights(static_cast<Eigen::Index>(r), c) > min_weight) {
      result.pairs.emplace_back(r, static_cast<std::size_t>(c));
      col_used[static_cast<std::size_t>(c)] = 1;
    } else {
      result.unmatched_rows.push_back(r);
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!col_used[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

}  // namespace fishtrack
