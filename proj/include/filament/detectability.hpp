#pragma once

// Minimum detectable elevated mean and the two-step decision thresholds.
// Natural logarithms throughout.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "filament/error.hpp"
#include "filament/normal.hpp"

namespace filament {

struct Thresholds {
  double step1 = 0.0;  // reject when |L0| exceeds this
  double step2 = 0.0;  // reject when X*_s exceeds this
  double x_star = 0.0;
  double epsilon = 0.0;
  double delta2 = 0.0;
};

inline void check_tuning(double epsilon, double delta2) {
  if (!(epsilon > 0.0)) throw argument_error("epsilon must be positive");
  if (!(delta2 > 0.0)) throw argument_error("delta2 must be positive");
}

/// step2 = sqrt(2 (1 + delta2) ln(mn)).
inline double scan_threshold(double n, double m, double delta2) {
  return std::sqrt(2.0 * (1.0 + delta2) * std::log(m * n));
}

/// Fixed-m thresholds: step1 = (1 + eps/2) ln n / ln(1/rho).
inline Thresholds decision_thresholds(double n, double m, double rho, double epsilon, double delta2, double x_star) {
  if (!(rho > 0.0 && rho < 1.0)) throw argument_error("decision_thresholds: rho must lie in (0, 1)");
  if (!(n > 1.0) || !(m >= 1.0)) throw argument_error("decision_thresholds: need n > 1 and m >= 1");
  check_tuning(epsilon, delta2);
  return {(1.0 + epsilon / 2.0) * std::log(n) / std::log(1.0 / rho), scan_threshold(n, m, delta2), x_star, epsilon,
          delta2};
}

/// Joint-growth thresholds: step1 = (1 + eps/2) ln(mn) / phi.
inline Thresholds growing_thresholds(double n, double m, double phi, double epsilon, double delta2, double x_star) {
  if (!(phi > 0.0)) throw argument_error("growing_thresholds: phi must be positive");
  if (!(n >= 1.0) || !(m >= 1.0) || !(m * n > 1.0)) throw argument_error("growing_thresholds: need mn > 1");
  check_tuning(epsilon, delta2);
  return {(1.0 + epsilon / 2.0) * std::log(m * n) / phi, scan_threshold(n, m, delta2), x_star, epsilon, delta2};
}

/// Smallest mu for which a planted chain of length ~ zeta n^alpha makes Step I
/// powerful: the per-node significance probability under the alternative must
/// exceed t = rho^(alpha ln(zeta n) / ((1 + eps) ln n)), so
/// mu* = x_star - Phi^{-1}(1 - t).
inline double mu_min_power_law(double n, double rho, double alpha, double zeta, double epsilon, double x_star) {
  if (!(rho > 0.0 && rho < 1.0)) throw domain_error("mu_min_power_law: rho must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw domain_error("mu_min_power_law: alpha must lie in (0, 1]");
  if (!(zeta > 0.0)) throw domain_error("mu_min_power_law: zeta must be positive");
  if (!(n > 1.0)) throw domain_error("mu_min_power_law: n must exceed 1");
  if (!(epsilon > 0.0)) throw domain_error("mu_min_power_law: epsilon must be positive");
  const double exponent = alpha * std::log(zeta * n) / ((1.0 + epsilon) * std::log(n));
  const double t = std::pow(rho, exponent);
  if (!(t < 1.0)) throw domain_error("mu_min_power_law: required significance probability is 1 (zeta n <= 1)");
  return x_star - normal_quantile(1.0 - t);
}

enum class LengthScale { log, sqrt };

/// Planted length c ln n (or c sqrt n).
inline double planted_length(double n, double c, LengthScale scale) {
  return scale == LengthScale::log ? c * std::log(n) : c * std::sqrt(n);
}

/// ln(1/p1) with p1 = P(N(mu,1) > x_star), accurate as p1 -> 1.
inline double neg_log_p1(double mu, double x_star) { return -std::log1p(-normal_sf(mu - x_star)); }

/// Left side of mu sqrt(log_{1/p1}(length)); increasing in mu.
inline double scan_signal(double mu, double length, double x_star) {
  const double denom = neg_log_p1(mu, x_star);
  if (denom <= 0.0) return INFINITY;
  return mu * std::sqrt(std::log(length) / denom);
}

/// Smallest mu with mu sqrt(log_{1/p1}(c ln n)) > sqrt((2 + delta2) ln(mn)),
/// by bisection on (0, 20] to 1e-6.
inline double mu_min_log_length(double n, double m, double c, double delta2, double x_star,
                                LengthScale scale = LengthScale::log) {
  if (!(c > 0.0)) throw domain_error("mu_min_log_length: c must be positive");
  if (!(delta2 > 0.0)) throw domain_error("mu_min_log_length: delta2 must be positive");
  if (!(n > 1.0) || !(m >= 1.0)) throw domain_error("mu_min_log_length: need n > 1 and m >= 1");
  const double length = planted_length(n, c, scale);
  if (!(length > 1.0)) throw domain_error("mu_min_log_length: planted length must exceed 1");
  const double target = std::sqrt((2.0 + delta2) * std::log(m * n));
  double lo = 0.0, hi = 20.0;
  if (!(scan_signal(hi, length, x_star) > target)) throw domain_error("mu_min_log_length: no root in (0, 20]");
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (scan_signal(mid, length, x_star) > target ? hi : lo) = mid;
  }
  return hi;
}

/// A table of mu* values: one row per image width n, one column per length constant.
struct MuTable {
  std::vector<double> widths;
  std::vector<std::string> column_labels;
  std::vector<double> column_values;
  std::vector<std::vector<double>> cells;
  int decimals = 4;
};

inline const std::vector<double>& linear_widths() {
  static const std::vector<double> widths{2e2, 3e2, 5e2, 1e3, 2e3, 5e3, 1e4, 1e5, 1e6};
  return widths;
}

inline const std::vector<double>& decade_widths() {
  static const std::vector<double> widths{1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
  return widths;
}

/// mu* for |L| = zeta n^alpha, over zeta in {1/10, 1/5, 1/4, 1/3, 1/2, 1}.
inline MuTable power_law_table(double rho, double alpha, double epsilon, double x_star) {
  MuTable table{linear_widths(), {"1/10", "1/5", "1/4", "1/3", "1/2", "1"}, {0.1, 0.2, 0.25, 1.0 / 3, 0.5, 1.0}, {}, 4};
  for (double n : table.widths) {
    auto& row = table.cells.emplace_back();
    for (double zeta : table.column_values) row.push_back(mu_min_power_law(n, rho, alpha, zeta, epsilon, x_star));
  }
  return table;
}

inline const std::vector<std::string>& sqrt_column_labels() {
  static const std::vector<std::string> labels{"1/3", "1/2", "1", "2", "3", "5", "10", "50"};
  return labels;
}
inline const std::vector<double>& sqrt_column_values() {
  static const std::vector<double> values{1.0 / 3, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 50.0};
  return values;
}

/// mu* for |L| = c sqrt n via the Step I condition (alpha = 1/2, zeta = c).
inline MuTable sqrt_length_table(double rho, double epsilon, double x_star) {
  MuTable table{decade_widths(), sqrt_column_labels(), sqrt_column_values(), {}, 4};
  for (double n : table.widths) {
    auto& row = table.cells.emplace_back();
    for (double c : table.column_values) row.push_back(mu_min_power_law(n, rho, 0.5, c, epsilon, x_star));
  }
  return table;
}

/// mu* for |L| = c sqrt n via the scan condition; looser than the Step I table.
inline MuTable sqrt_scan_table(double m, double delta2, double x_star) {
  MuTable table{decade_widths(), sqrt_column_labels(), sqrt_column_values(), {}, 4};
  for (double n : table.widths) {
    auto& row = table.cells.emplace_back();
    for (double c : table.column_values) row.push_back(mu_min_log_length(n, m, c, delta2, x_star, LengthScale::sqrt));
  }
  return table;
}

/// mu* for |L| = c ln n, over c in {1, 2, 5, 10, 50, 100}.
inline MuTable log_length_table(double m, double delta2, double x_star) {
  MuTable table{decade_widths(), {"1", "2", "5", "10", "50", "100"}, {1, 2, 5, 10, 50, 100}, {}, 2};
  for (double n : table.widths) {
    auto& row = table.cells.emplace_back();
    for (double c : table.column_values) row.push_back(mu_min_log_length(n, m, c, delta2, x_star));
  }
  return table;
}

}  // namespace filament
