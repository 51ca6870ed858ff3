#pragma once

// Monte Carlo harness: error rates of the detector, alarm calibration for
// frame mode, and the longest significant sub-run inside a planted chain.
// Trial t always draws from substream t of the experiment seed, so results
// do not depend on the thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "filament/detector.hpp"
#include "filament/error.hpp"
#include "filament/grid.hpp"
#include "filament/parallel.hpp"
#include "filament/random.hpp"

namespace filament {

enum class LengthLaw { linear, sqrt, log, fixed };

inline const char* to_string(LengthLaw law) {
  switch (law) {
    case LengthLaw::linear: return "linear";
    case LengthLaw::sqrt: return "sqrt";
    case LengthLaw::log: return "log";
    case LengthLaw::fixed: return "fixed";
  }
  return "unknown";
}

inline LengthLaw parse_length_law(const std::string& name) {
  if (name == "linear") return LengthLaw::linear;
  if (name == "sqrt") return LengthLaw::sqrt;
  if (name == "log") return LengthLaw::log;
  if (name == "fixed") return LengthLaw::fixed;
  throw argument_error("unknown length law '" + name + "' (expected linear, sqrt, log or fixed)");
}

/// Planted length: round(zeta n), round(c sqrt n), round(c ln n) or k, at least 1.
inline std::size_t chain_length(LengthLaw law, double value, std::size_t cols) {
  if (!(value > 0.0) || !std::isfinite(value)) throw argument_error("chain_length: length constant must be positive");
  const auto n = static_cast<double>(cols);
  double len = value;
  switch (law) {
    case LengthLaw::linear: len = value * n; break;
    case LengthLaw::sqrt: len = value * std::sqrt(n); break;
    case LengthLaw::log: len = value * std::log(n); break;
    case LengthLaw::fixed: break;
  }
  len = std::max(1.0, std::round(len));
  if (len > n) {
    throw argument_error("chain_length: " + std::string(to_string(law)) + " law gives length " +
                         std::to_string(static_cast<long long>(len)) + " > n = " + std::to_string(cols));
  }
  return static_cast<std::size_t>(len);
}

struct ExperimentSpec {
  std::size_t m = 10;
  std::size_t n = 1000;
  DetectorConfig detector;
  LengthLaw length_law = LengthLaw::linear;
  double length_value = 0.2;
  double mu = 0.0;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  bool fixed_chain = false;  // one chain shared by every trial
};

enum class ErrorKind { type1, type2, power };

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::type1: return "type1";
    case ErrorKind::type2: return "type2";
    case ErrorKind::power: return "power";
  }
  return "unknown";
}

struct ErrorEstimate {
  double rate = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  ErrorKind kind = ErrorKind::type1;
};

inline ErrorEstimate binomial_estimate(std::size_t hits, std::size_t trials, ErrorKind kind) {
  const double rate = static_cast<double>(hits) / static_cast<double>(trials);
  return {rate, std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials)), trials, kind};
}

/// 1 - power, same trials.
inline ErrorEstimate type2_from_power(const ErrorEstimate& power) {
  return {1.0 - power.rate, power.std_error, power.trials, ErrorKind::type2};
}

namespace detail {

inline void check_experiment(const ExperimentSpec& spec) {
  if (spec.m < 1 || spec.n < 2) throw argument_error("experiment: need m >= 1 and n >= 2");
  if (spec.trials < 50) throw argument_error("experiment: trials must be at least 50");
}

inline std::uint64_t grid_seed(std::uint64_t seed, std::size_t trial) { return substream_seed(seed, trial); }
inline std::uint64_t chain_seed(std::uint64_t seed, std::size_t trial) {
  return substream_seed(substream_seed(seed, trial), 1);
}

}  // namespace detail

/// Fraction of null rasters the detector rejects.
inline ErrorEstimate estimate_type1(const ExperimentSpec& spec, unsigned threads = 0) {
  detail::check_experiment(spec);
  const auto config = resolve(spec.detector, spec.m);
  std::vector<std::uint8_t> rejected(spec.trials, 0);
  parallel_for(spec.trials, threads, [&](std::size_t t) {
    rejected[t] = detect(generate_null_grid(spec.m, spec.n, detail::grid_seed(spec.seed, t)), config).reject_null;
  });
  return binomial_estimate(std::count(rejected.begin(), rejected.end(), 1), spec.trials, ErrorKind::type1);
}

/// Fraction of rasters with a planted chain of mean `mu` that the detector
/// rejects. The noise of trial t matches estimate_type1's trial t, so mu = 0
/// reproduces the type-I count exactly.
inline ErrorEstimate estimate_power(const ExperimentSpec& spec, unsigned threads = 0) {
  detail::check_experiment(spec);
  if (!(spec.mu >= 0.0) || !std::isfinite(spec.mu)) throw argument_error("estimate_power: mu must be non-negative");
  const std::size_t length = chain_length(spec.length_law, spec.length_value, spec.n);
  const auto config = resolve(spec.detector, spec.m);
  std::optional<ChainPath> shared;
  if (spec.fixed_chain) shared = generate_chain(spec.m, spec.n, config.drift, length, substream_seed(spec.seed, ~0ULL));
  std::vector<std::uint8_t> rejected(spec.trials, 0);
  parallel_for(spec.trials, threads, [&](std::size_t t) {
    const auto chain =
        shared ? *shared : generate_chain(spec.m, spec.n, config.drift, length, detail::chain_seed(spec.seed, t));
    auto grid = embed_chain(generate_null_grid(spec.m, spec.n, detail::grid_seed(spec.seed, t)), chain, spec.mu);
    rejected[t] = detect(grid, config).reject_null;
  });
  return binomial_estimate(std::count(rejected.begin(), rejected.end(), 1), spec.trials, ErrorKind::power);
}

struct AlarmLevels {
  double l0_alarm = 0.0;
  double scan_alarm = 0.0;
  double per_statistic_level = 0.0;
};

/// Empirical upper quantile: the smallest sample value v with
/// #{x > v} <= level * count.
inline double upper_quantile(std::vector<double> values, double level) {
  if (values.empty()) throw argument_error("upper_quantile: no samples");
  std::sort(values.begin(), values.end());
  const auto count = static_cast<double>(values.size());
  const double k = std::ceil(count * (1.0 - level) - 1e-9) - 1.0;
  return values[static_cast<std::size_t>(std::clamp(k, 0.0, count - 1.0))];
}

/// Alarm levels for frame mode from `trials` null frames. Each statistic gets
/// tail level 1 - sqrt(1 - alpha); both statistics increase with the
/// intensities, so the union alarm has level at most alpha.
inline AlarmLevels calibrate_alarms(std::size_t m, std::size_t n, const DetectorConfig& config, double alpha,
                                    std::size_t trials, std::uint64_t seed, unsigned threads = 0) {
  if (m < 1 || n < 1) throw argument_error("calibrate_alarms: dimensions must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw argument_error("calibrate_alarms: alpha must lie in (0, 1]");
  const double level = 1.0 - std::sqrt(1.0 - alpha);
  if (static_cast<double>(trials) * level < 1.0) {
    throw argument_error("calibrate_alarms: " + std::to_string(trials) + " trials are too few for alpha = " +
                         std::to_string(alpha) + " (need at least " +
                         std::to_string(static_cast<long long>(std::ceil(1.0 / level))) + ")");
  }
  validate(config);
  DetectorConfig resolved = config;
  if (!resolved.rho && resolved.regime == Regime::fixed_rows && m <= max_exact_rows) resolved = resolve(config, m);
  const std::size_t cap = scan_length_cap(resolved, m, std::max<std::size_t>(n, 2));
  std::vector<double> l0(trials), xs(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    auto stats = frame_statistics(generate_null_grid(m, n, substream_seed(seed, t)), resolved.drift, resolved.x_star, cap);
    l0[t] = static_cast<double>(stats.l0_length);
    xs[t] = stats.x_star_s;
  });
  return {upper_quantile(std::move(l0), level), upper_quantile(std::move(xs), level), level};
}

/// Longest run of significant nodes along a planted chain of `length` nodes
/// carrying mean `mu`: each node is significant with probability 1 - Phi(x_star - mu).
inline std::size_t planted_subrun(std::size_t length, double mu, double x_star, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(mu, 1.0);
  std::size_t best = 0, run = 0;
  for (std::size_t k = 0; k < length; ++k) {
    run = normal(rng) > x_star ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

inline double mean_planted_subrun(std::size_t length, double mu, double x_star, std::size_t trials, std::uint64_t seed,
                                  unsigned threads = 0) {
  if (length < 1 || trials < 1) throw argument_error("mean_planted_subrun: length and trials must be positive");
  std::vector<double> runs(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    runs[t] = static_cast<double>(planted_subrun(length, mu, x_star, substream_seed(seed, t)));
  });
  double sum = 0.0;
  for (double r : runs) sum += r;
  return sum / static_cast<double>(trials);
}

}  // namespace filament
