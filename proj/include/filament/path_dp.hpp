#pragma once

// Longest significant chain |L0(n)|.
//
// Y1(i, j) = z(i, j) * (1 + max_{|i'-i| <= C} Y1(i', j-1)) is the length of the
// longest significant chain ending at (i, j). Only the previous column is kept,
// so the sweep needs O(m) memory. The witness is rebuilt afterwards from a
// window of exactly |L0| columns ending at the argmax.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "filament/error.hpp"
#include "filament/grid.hpp"

namespace filament {

struct RunResult {
  std::size_t length = 0;
  std::optional<ChainPath> witness;
};

namespace detail {

inline std::size_t window_lo(std::size_t row, std::size_t drift) { return row > drift ? row - drift : 0; }
inline std::size_t window_hi(std::size_t row, std::size_t drift, std::size_t rows) {
  return std::min(rows - 1, row + drift);
}

// Chain of exactly `length` significant nodes ending at (end_row, end_col).
// Ties go to the smallest predecessor row.
inline ChainPath rebuild_run(const SignificanceMap& map, std::size_t drift, std::size_t end_row, std::size_t end_col,
                             std::size_t length) {
  const std::size_t rows = map.rows();
  const std::size_t start = end_col + 1 - length;
  // reach[k][i]: a significant chain starting in column `start` reaches (i, start + k).
  std::vector<std::vector<std::uint8_t>> reach(length, std::vector<std::uint8_t>(rows, 0));
  for (std::size_t i = 0; i < rows; ++i) reach[0][i] = map(i, start) ? 1 : 0;
  for (std::size_t k = 1; k < length; ++k) {
    for (std::size_t i = 0; i < rows; ++i) {
      if (!map(i, start + k)) continue;
      for (std::size_t q = window_lo(i, drift); q <= window_hi(i, drift, rows); ++q) {
        if (reach[k - 1][q]) {
          reach[k][i] = 1;
          break;
        }
      }
    }
  }
  ChainPath chain{start, std::vector<std::size_t>(length)};
  std::size_t row = end_row;
  for (std::size_t k = length; k-- > 0;) {
    chain.rows[k] = row;
    if (k == 0) break;
    for (std::size_t q = window_lo(row, drift); q <= window_hi(row, drift, rows); ++q) {
      if (reach[k - 1][q]) {
        row = q;
        break;
      }
    }
  }
  return chain;
}

}  // namespace detail

/// Exact |L0(n)| in O(C m n) time. With `want_witness` the argmax chain is
/// returned too (earliest end column, then smallest row).
inline RunResult longest_run_length(const SignificanceMap& map, std::size_t drift, bool want_witness = true) {
  const std::size_t rows = map.rows();
  std::vector<std::size_t> prev(rows, 0), cur(rows, 0);
  std::size_t best = 0, best_row = 0, best_col = 0;

  for (std::size_t j = 0; j < map.cols(); ++j) {
    auto z = map.column(j);
    for (std::size_t i = 0; i < rows; ++i) {
      if (!z[i]) {
        cur[i] = 0;
        continue;
      }
      std::size_t m = 0;
      if (j > 0) {
        for (std::size_t q = detail::window_lo(i, drift); q <= detail::window_hi(i, drift, rows); ++q) {
          m = std::max(m, prev[q]);
        }
      }
      cur[i] = m + 1;
      if (cur[i] > best) {
        best = cur[i];
        best_row = i;
        best_col = j;
      }
    }
    std::swap(prev, cur);
  }

  RunResult result{best, std::nullopt};
  if (want_witness && best > 0) result.witness = detail::rebuild_run(map, drift, best_row, best_col, best);
  return result;
}

/// Exhaustive enumeration of significant chains, independent of the DP.
/// Guarded to n <= 12 columns and m*n <= 64 nodes.
inline std::size_t longest_run_bruteforce(const SignificanceMap& map, std::size_t drift) {
  if (map.cols() > 12 || map.rows() * map.cols() > 64) {
    throw capacity_error("longest_run_bruteforce: instance exceeds n <= 12, m*n <= 64");
  }
  std::size_t best = 0;
  std::function<void(std::size_t, std::size_t, std::size_t)> extend = [&](std::size_t row, std::size_t col,
                                                                           std::size_t len) {
    best = std::max(best, len);
    if (col + 1 == map.cols()) return;
    for (long long d = -static_cast<long long>(drift); d <= static_cast<long long>(drift); ++d) {
      long long next = static_cast<long long>(row) + d;
      if (next < 0 || next >= static_cast<long long>(map.rows())) continue;
      if (map(static_cast<std::size_t>(next), col + 1)) extend(static_cast<std::size_t>(next), col + 1, len + 1);
    }
  };
  for (std::size_t c = 0; c < map.cols(); ++c) {
    for (std::size_t r = 0; r < map.rows(); ++r) {
      if (map(r, c)) extend(r, c, 1);
    }
  }
  return best;
}

}  // namespace filament
