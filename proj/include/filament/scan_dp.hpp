#pragma once

// Scan statistic X*_s = max over significant chains L with |L| <= U of
// sum_{(i,j) in L} X(i,j) / sqrt(|L|).
//
// Y2(i, j, u) is the best sum of a significant chain of exactly u nodes ending
// at (i, j):
//   Y2(i, j, 1) = X(i, j)                                   if z(i, j)
//   Y2(i, j, u) = X(i, j) + max_{|i'-i| <= C} Y2(i', j-1, u-1)
// and is unreachable when no such chain exists. A length-u chain ending at
// (i, j) exists iff u <= Y1(i, j), so each node only stores min(U, Y1(i, j))
// layers; everything above is unreachable by construction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "filament/error.hpp"
#include "filament/grid.hpp"
#include "filament/path_dp.hpp"

namespace filament {

/// Value of X*_s when the grid has no significant node.
inline constexpr double unreachable = -std::numeric_limits<double>::infinity();

struct ScanResult {
  double value = unreachable;
  std::optional<ChainPath> arg_chain;
  std::size_t arg_length = 0;

  bool found() const noexcept { return value != unreachable; }
};

namespace detail {

inline void check_scan_inputs(const ImageGrid& grid, const SignificanceMap& map) {
  if (grid.rows() != map.rows() || grid.cols() != map.cols()) {
    throw argument_error("scan: grid and significance map dimensions differ");
  }
}

// Max-sum significant chain of exactly `length` nodes ending at (end_row,
// end_col); ties go to the smallest predecessor row.
inline ChainPath rebuild_scan(const ImageGrid& grid, const SignificanceMap& map, std::size_t drift,
                              std::size_t end_row, std::size_t end_col, std::size_t length) {
  const std::size_t rows = grid.rows();
  const std::size_t start = end_col + 1 - length;
  std::vector<std::vector<double>> best(length, std::vector<double>(rows, unreachable));
  for (std::size_t i = 0; i < rows; ++i) {
    if (map(i, start)) best[0][i] = grid(i, start);
  }
  for (std::size_t k = 1; k < length; ++k) {
    for (std::size_t i = 0; i < rows; ++i) {
      if (!map(i, start + k)) continue;
      double m = unreachable;
      for (std::size_t q = window_lo(i, drift); q <= window_hi(i, drift, rows); ++q) m = std::max(m, best[k - 1][q]);
      if (m != unreachable) best[k][i] = grid(i, start + k) + m;
    }
  }
  ChainPath chain{start, std::vector<std::size_t>(length)};
  std::size_t row = end_row;
  for (std::size_t k = length; k-- > 0;) {
    chain.rows[k] = row;
    if (k == 0) break;
    double m = unreachable;
    for (std::size_t q = window_lo(row, drift); q <= window_hi(row, drift, rows); ++q) m = std::max(m, best[k - 1][q]);
    for (std::size_t q = window_lo(row, drift); q <= window_hi(row, drift, rows); ++q) {
      if (best[k - 1][q] == m) {
        row = q;
        break;
      }
    }
  }
  return chain;
}

}  // namespace detail

/// Capped scan statistic. Runs in O(m n + sum of min(U, Y1)) time, which is
/// O(C m n U) in the worst case.
inline ScanResult scan_statistic(const ImageGrid& grid, const SignificanceMap& map, std::size_t drift,
                                 std::size_t cap, bool want_witness = true) {
  detail::check_scan_inputs(grid, map);
  if (cap < 1 || cap > grid.cols()) {
    throw argument_error("scan_statistic: length cap " + std::to_string(cap) + " outside [1, " +
                         std::to_string(grid.cols()) + "]");
  }
  const std::size_t rows = grid.rows();
  std::vector<double> inv_sqrt(cap + 1, 0.0);
  for (std::size_t u = 1; u <= cap; ++u) inv_sqrt[u] = 1.0 / std::sqrt(static_cast<double>(u));

  // layers[i * cap + (u - 1)] = Y2(i, j, u) for u <= depth[i].
  std::vector<double> prev(rows * cap), cur(rows * cap);
  std::vector<std::size_t> prev_depth(rows, 0), cur_depth(rows, 0);

  ScanResult result;
  std::size_t best_row = 0, best_col = 0;

  for (std::size_t j = 0; j < grid.cols(); ++j) {
    auto z = map.column(j);
    auto x_col = grid.column(j);
    for (std::size_t i = 0; i < rows; ++i) {
      if (!z[i]) {
        cur_depth[i] = 0;
        continue;
      }
      const std::size_t lo = detail::window_lo(i, drift), hi = detail::window_hi(i, drift, rows);
      std::size_t depth = 1;
      for (std::size_t q = lo; q <= hi; ++q) depth = std::max(depth, std::min(cap, prev_depth[q] + 1));

      double* out = cur.data() + i * cap;
      const double x = x_col[i];
      std::fill(out + 1, out + depth, unreachable);
      for (std::size_t q = lo; q <= hi; ++q) {
        const double* in = prev.data() + q * cap;
        const std::size_t top = std::min(depth, prev_depth[q] + 1);
        for (std::size_t u = 1; u < top; ++u) out[u] = std::max(out[u], in[u - 1]);
      }
      out[0] = x;
      for (std::size_t u = 1; u < depth; ++u) out[u] = x + out[u];
      cur_depth[i] = depth;

      for (std::size_t u = 0; u < depth; ++u) {
        double score = out[u] * inv_sqrt[u + 1];
        if (score > result.value) {
          result.value = score;
          result.arg_length = u + 1;
          best_row = i;
          best_col = j;
        }
      }
    }
    std::swap(prev, cur);
    std::swap(prev_depth, cur_depth);
  }

  if (want_witness && result.found()) {
    result.arg_chain = detail::rebuild_scan(grid, map, drift, best_row, best_col, result.arg_length);
  }
  return result;
}

/// Exhaustive maximum over every significant chain (no length cap).
/// Guarded to n <= 12 columns and m <= 4 rows.
inline double scan_bruteforce(const ImageGrid& grid, const SignificanceMap& map, std::size_t drift) {
  detail::check_scan_inputs(grid, map);
  if (grid.cols() > 12 || grid.rows() > 4) throw capacity_error("scan_bruteforce: instance exceeds n <= 12, m <= 4");
  double best = unreachable;
  std::function<void(std::size_t, std::size_t, double, std::size_t)> extend = [&](std::size_t row, std::size_t col,
                                                                                  double sum, std::size_t len) {
    best = std::max(best, sum / std::sqrt(static_cast<double>(len)));
    if (col + 1 == grid.cols()) return;
    for (long long d = -static_cast<long long>(drift); d <= static_cast<long long>(drift); ++d) {
      long long next = static_cast<long long>(row) + d;
      if (next < 0 || next >= static_cast<long long>(grid.rows())) continue;
      auto r = static_cast<std::size_t>(next);
      if (map(r, col + 1)) extend(r, col + 1, sum + grid(r, col + 1), len + 1);
    }
  };
  for (std::size_t c = 0; c < grid.cols(); ++c) {
    for (std::size_t r = 0; r < grid.rows(); ++r) {
      if (map(r, c)) extend(r, c, grid(r, c), 1);
    }
  }
  return best;
}

}  // namespace filament
