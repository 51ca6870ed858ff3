#pragma once

// Standard normal distribution function, upper tail and quantile.

#include <array>
#include <cmath>
#include <numbers>

#include "filament/error.hpp"

namespace filament {

inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Phi(x), computed as erfc(-x/sqrt2)/2 so the lower tail keeps full relative precision.
inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// 1 - Phi(x) without cancellation.
inline double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace detail {

// Rational approximation for the lower half (P. J. Acklam), relative error
// about 1.15e-9 before refinement.
inline double acklam_lower(double q) noexcept {
  static constexpr std::array a{-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array b{-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr std::array c{-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array d{7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                3.754408661907416e+00};
  constexpr double q_low = 0.02425;
  if (q < q_low) {
    double t = std::sqrt(-2.0 * std::log(q));
    return (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
           ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }
  double t = q - 0.5;
  double r = t * t;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Phi^{-1}(q) for q in (0, 1).
inline double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw domain_error("normal_quantile: probability must lie in (0, 1)");
  if (q == 0.5) return 0.0;
  // Work in the lower half so the residual Phi(x) - q is computed without cancellation.
  const bool upper = q > 0.5;
  const double tail = upper ? 1.0 - q : q;
  double x = detail::acklam_lower(tail);
  for (int it = 0; it < 3; ++it) {
    double residual = normal_cdf(x) - tail;
    double step = residual / normal_pdf(x);
    x -= step / (1.0 + 0.5 * x * step);  // Halley correction
  }
  return upper ? -x : x;
}

}  // namespace filament
