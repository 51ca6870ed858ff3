#pragma once

// Run-rate constant rho: the limit of P(across chain in n columns) /
// P(across chain in n-1 columns) for an m-row Bernoulli(p) net.
//
// State A is the nonempty set of rows in the current column where an across
// significant chain ends. The next state is A' = (significant rows) & N_C(A),
// so rows outside N_C(A) marginalize out:
//   T(A, A') = p^|A'| (1-p)^(|N_C(A)| - |A'|)   for nonempty A' within N_C(A).
// P_n is the mass left after n steps, hence rho is the Perron root of T.
//
// Subsets are bitmasks (bit r = row r). T is never stored: with
// w(B) = (p/(1-p))^|B| v(B),
//   (T v)(A) = (1-p)^|N(A)| * sum_{B within N(A)} w(B),
// and all subset sums come from one zeta transform, O(m 2^m) per product.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "filament/error.hpp"
#include "filament/grid.hpp"
#include "filament/parallel.hpp"
#include "filament/path_dp.hpp"
#include "filament/random.hpp"

namespace filament {

using RowSet = std::uint32_t;

inline constexpr std::size_t max_exact_rows = 20;

/// Union of the row windows [r - C, r + C] over r in `rows`, clipped to [0, m).
inline RowSet neighborhood(RowSet rows, std::size_t drift, std::size_t m) {
  if (rows == 0) throw argument_error("neighborhood: row set must be nonempty");
  if (m == 0 || m > 32 || (m < 32 && (rows >> m) != 0)) throw argument_error("neighborhood: row set exceeds [0, m)");
  const std::uint64_t full = (std::uint64_t{1} << m) - 1;
  std::uint64_t spread = rows;
  for (std::size_t d = 1; d <= drift && d < m; ++d) spread |= (std::uint64_t{rows} << d) | (std::uint64_t{rows} >> d);
  return static_cast<RowSet>(spread & full);
}

class TransferOperator {
 public:
  TransferOperator(std::size_t rows, std::size_t drift, double p) : rows_(rows), drift_(drift), p_(p) {
    const std::size_t masks = std::size_t{1} << rows;
    neighbors_.resize(masks, 0);
    for (std::size_t a = 1; a < masks; ++a) {
      // N(A) = N(A without lowest bit) | N(lowest bit)
      auto low = a & (~a + 1);
      neighbors_[a] = neighbors_[a ^ low] | neighborhood(static_cast<RowSet>(low), drift, rows);
    }
    q_pow_.resize(rows + 1);
    ratio_pow_.resize(rows + 1);
    for (std::size_t k = 0; k <= rows; ++k) {
      q_pow_[k] = std::pow(1.0 - p, static_cast<double>(k));
      ratio_pow_[k] = std::pow(p / (1.0 - p), static_cast<double>(k));
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t drift() const noexcept { return drift_; }
  double p() const noexcept { return p_; }
  /// Number of states, 2^m - 1. State index s corresponds to row set s + 1.
  std::size_t states() const noexcept { return (std::size_t{1} << rows_) - 1; }

  double entry(RowSet from, RowSet to) const {
    if (from == 0 || to == 0) return 0.0;
    auto n = neighbors_.at(from);
    if ((to & ~n) != 0) return 0.0;
    auto k = std::popcount(to), nk = std::popcount(n);
    return std::pow(p_, k) * q_pow_[static_cast<std::size_t>(nk - k)];
  }

  /// out = T v, both indexed by row set (index 0, the empty set, is ignored and written as 0).
  void apply(const std::vector<double>& v, std::vector<double>& out) const {
    const std::size_t masks = std::size_t{1} << rows_;
    out.assign(masks, 0.0);
    std::vector<double> sums(masks, 0.0);
    for (std::size_t b = 1; b < masks; ++b) sums[b] = ratio_pow_[static_cast<std::size_t>(std::popcount(b))] * v[b];
    for (std::size_t bit = 0; bit < rows_; ++bit) {
      const std::size_t step = std::size_t{1} << bit;
      for (std::size_t b = 0; b < masks; ++b) {
        if (b & step) sums[b] += sums[b ^ step];
      }
    }
    for (std::size_t a = 1; a < masks; ++a) {
      auto n = neighbors_[a];
      out[a] = q_pow_[static_cast<std::size_t>(std::popcount(n))] * sums[n];
    }
  }

  /// Row-major dense matrix over states (row set s + 1 at index s). Small m only.
  std::vector<double> dense() const {
    if (rows_ > 12) throw capacity_error("TransferOperator::dense: m > 12");
    const std::size_t n = states();
    std::vector<double> m(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) m[a * n + b] = entry(static_cast<RowSet>(a + 1), static_cast<RowSet>(b + 1));
    }
    return m;
  }

 private:
  std::size_t rows_;
  std::size_t drift_;
  double p_;
  std::vector<RowSet> neighbors_;
  std::vector<double> q_pow_;
  std::vector<double> ratio_pow_;
};

inline TransferOperator build_transfer_operator(std::size_t rows, std::size_t drift, double p) {
  if (rows < 1) throw argument_error("build_transfer_operator: m must be at least 1");
  if (rows > max_exact_rows) {
    throw capacity_error("build_transfer_operator: m = " + std::to_string(rows) +
                         " exceeds 20 rows; use the Monte Carlo estimator instead");
  }
  if (drift < 1) throw argument_error("build_transfer_operator: drift bound C must be at least 1");
  if (!(p > 0.0 && p < 1.0)) throw argument_error("build_transfer_operator: p must lie in (0, 1)");
  return TransferOperator(rows, drift, p);
}

// `supplied` marks a value given by the caller, e.g. a reference constant.
enum class RhoMethod { exact_spectral, monte_carlo, supplied };

inline const char* to_string(RhoMethod method) {
  switch (method) {
    case RhoMethod::exact_spectral: return "exact-spectral";
    case RhoMethod::monte_carlo: return "monte-carlo";
    case RhoMethod::supplied: return "supplied";
  }
  return "unknown";
}

struct RhoValue {
  double rho = 0.0;
  std::size_t rows = 0;
  std::size_t drift = 0;
  double p = 0.0;
  RhoMethod method = RhoMethod::exact_spectral;
};

/// Spectral radius by power iteration from the all-ones vector; stops when
/// successive Rayleigh quotients differ by less than `tol`.
inline RhoValue perron_root(const TransferOperator& op, double tol = 1e-10) {
  if (!(tol > 0.0)) throw argument_error("perron_root: tolerance must be positive");
  const std::size_t masks = op.states() + 1;
  std::vector<double> v(masks, 1.0), w;
  v[0] = 0.0;
  double previous = -1.0;
  constexpr std::size_t max_iterations = 1'000'000;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    op.apply(v, w);
    double vw = 0.0, vv = 0.0, ww = 0.0;
    for (std::size_t s = 1; s < masks; ++s) {
      vw += v[s] * w[s];
      vv += v[s] * v[s];
      ww += w[s] * w[s];
    }
    const double rayleigh = vw / vv;
    if (std::abs(rayleigh - previous) < tol) return {rayleigh, op.rows(), op.drift(), op.p(), RhoMethod::exact_spectral};
    previous = rayleigh;
    const double scale = 1.0 / std::sqrt(ww);
    for (std::size_t s = 1; s < masks; ++s) v[s] = w[s] * scale;
  }
  throw numeric_error("perron_root: power iteration did not converge");
}

inline RhoValue exact_rho(std::size_t rows, std::size_t drift, double p, double tol = 1e-10) {
  return perron_root(build_transfer_operator(rows, drift, p), tol);
}

/// Inverts |L0(n)| ~ log_{1/rho} n per trial (rho ~ n^{-1/|L0|}) and averages.
/// Trials with no significant node are skipped.
inline RhoValue estimate_rho_mc(std::size_t rows, std::size_t drift, double p, std::size_t n_cols, std::size_t trials,
                                std::uint64_t seed, unsigned threads = 0) {
  if (rows < 1) throw argument_error("estimate_rho_mc: m must be at least 1");
  if (n_cols < 1000) throw argument_error("estimate_rho_mc: n_cols must be at least 1000");
  if (trials < 1) throw argument_error("estimate_rho_mc: trials must be at least 1");
  if (!(p > 0.0 && p < 1.0)) throw argument_error("estimate_rho_mc: p must lie in (0, 1)");
  std::vector<std::size_t> lengths(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    auto map = bernoulli_map(rows, n_cols, p, substream_seed(seed, t));
    lengths[t] = longest_run_length(map, drift, false).length;
  });
  double sum = 0.0;
  std::size_t used = 0;
  for (auto len : lengths) {
    if (len == 0) continue;
    sum += std::pow(static_cast<double>(n_cols), -1.0 / static_cast<double>(len));
    ++used;
  }
  if (used == 0) throw estimation_error("estimate_rho_mc: every trial had an empty significance map");
  return {sum / static_cast<double>(used), rows, drift, p, RhoMethod::monte_carlo};
}

struct GridSize {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// Joint-growth rate constant: 1 / mean(|L0(m,n)| / ln(mn)) at the largest size.
/// `sizes` must be increasing in m*n.
inline double estimate_phi(double p, std::size_t drift, const std::vector<GridSize>& sizes, std::size_t trials,
                           std::uint64_t seed, unsigned threads = 0) {
  if (!(p > 0.0 && p * static_cast<double>(2 * drift + 1) < 1.0)) {
    throw domain_error("estimate_phi: requires 0 < p < 1/(2C+1), below which the critical probability lies");
  }
  if (sizes.empty()) throw argument_error("estimate_phi: at least one size is required");
  if (trials < 1) throw argument_error("estimate_phi: trials must be at least 1");
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k].rows < 2 || sizes[k].cols < 2) throw argument_error("estimate_phi: sizes need m >= 2 and n >= 2");
    if (k > 0 && sizes[k].rows * sizes[k].cols <= sizes[k - 1].rows * sizes[k - 1].cols) {
      throw argument_error("estimate_phi: sizes must be increasing");
    }
  }
  // Only the largest size enters the estimate; the rest of the list documents the growth path.
  const std::size_t k = sizes.size() - 1;
  const auto [m, n] = sizes[k];
  std::vector<double> ratios(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    auto map = bernoulli_map(m, n, p, substream_seed(substream_seed(seed, k), t));
    ratios[t] = static_cast<double>(longest_run_length(map, drift, false).length) /
                std::log(static_cast<double>(m) * static_cast<double>(n));
  });
  double ratio = 0.0;
  for (double r : ratios) ratio += r;
  ratio /= static_cast<double>(trials);
  if (!(ratio > 0.0)) throw estimation_error("estimate_phi: no significant chain observed");
  return 1.0 / ratio;
}

}  // namespace filament
