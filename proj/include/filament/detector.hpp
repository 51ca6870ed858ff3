#pragma once

// Two-step chain detector.
//
// Step I rejects when the longest significant chain is too long for noise.
// Otherwise Step II rejects when the capped scan statistic is too large.
// Frame mode computes both statistics per frame and compares them to
// user-supplied alarm levels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "filament/detectability.hpp"
#include "filament/error.hpp"
#include "filament/grid.hpp"
#include "filament/normal.hpp"
#include "filament/parallel.hpp"
#include "filament/path_dp.hpp"
#include "filament/rho.hpp"
#include "filament/scan_dp.hpp"

namespace filament {

enum class Regime { fixed_rows, growing_rows };
enum class Stage { none, step1, step2 };

inline const char* to_string(Regime regime) { return regime == Regime::fixed_rows ? "fixed-m" : "growing-m"; }

inline const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::step1: return "step1";
    case Stage::step2: return "step2";
    default: return "none";
  }
}

struct DetectorConfig {
  std::size_t drift = 1;
  double x_star = normal_quantile(0.9);
  double epsilon = 1e-4;
  double delta2 = 1e-4;
  std::optional<RhoValue> rho;       // resolved from (m, C, p) when absent and m <= 20
  std::optional<double> phi;         // growing-m rate constant
  std::optional<std::size_t> scan_cap;
  Regime regime = Regime::fixed_rows;

  /// Per-node significance probability under the null.
  double p() const { return normal_sf(x_star); }
};

/// Checks the configuration guard p < 1/(2C+1) and the tuning constants.
inline void validate(const DetectorConfig& config) {
  if (config.drift < 1) throw config_error("detector: drift bound C must be at least 1");
  if (!std::isfinite(config.x_star)) throw config_error("detector: x_star must be finite");
  if (!(config.epsilon > 0.0)) throw config_error("detector: epsilon must be positive");
  if (!(config.delta2 > 0.0)) throw config_error("detector: delta2 must be positive");
  const double p = config.p();
  if (!(p * static_cast<double>(2 * config.drift + 1) < 1.0)) {
    throw config_error("detector: p = 1 - Phi(x_star) = " + std::to_string(p) + " must be below 1/(2C+1) = " +
                       std::to_string(1.0 / static_cast<double>(2 * config.drift + 1)));
  }
  if (config.phi && !(*config.phi > 0.0)) throw config_error("detector: phi must be positive");
  if (config.scan_cap && *config.scan_cap < 1) throw config_error("detector: scan cap must be at least 1");
}

/// Returns a copy of `config` whose rho is filled in for an m-row raster.
/// Supplied values must match (m, C, p); exact values are computed for m <= 20.
inline DetectorConfig resolve(DetectorConfig config, std::size_t rows) {
  validate(config);
  const double p = config.p();
  if (config.rho) {
    const auto& r = *config.rho;
    if (!(r.rho > 0.0 && r.rho < 1.0)) throw config_error("detector: rho must lie in (0, 1)");
    if (r.rows != rows || r.drift != config.drift || std::abs(r.p - p) > 1e-9 * std::max(1.0, p)) {
      throw config_error("detector: rho was computed for (m=" + std::to_string(r.rows) + ", C=" +
                         std::to_string(r.drift) + ", p=" + std::to_string(r.p) + "), raster needs (m=" +
                         std::to_string(rows) + ", C=" + std::to_string(config.drift) + ", p=" + std::to_string(p) +
                         ")");
    }
    return config;
  }
  if (config.regime == Regime::growing_rows) {
    if (!config.phi) throw config_error("detector: growing-m regime needs phi");
    return config;
  }
  if (rows > max_exact_rows) {
    throw config_error("detector: m = " + std::to_string(rows) +
                       " exceeds 20 rows; supply rho or use the growing-m regime with phi");
  }
  config.rho = exact_rho(rows, config.drift, p);
  return config;
}

inline Thresholds thresholds_for(const DetectorConfig& config, std::size_t rows, std::size_t cols) {
  const auto m = static_cast<double>(rows), n = static_cast<double>(cols);
  if (config.regime == Regime::growing_rows) {
    if (!config.phi) throw config_error("detector: growing-m regime needs phi");
    return growing_thresholds(n, m, *config.phi, config.epsilon, config.delta2, config.x_star);
  }
  if (!config.rho) throw config_error("detector: rho is unresolved");
  return decision_thresholds(n, m, config.rho->rho, config.epsilon, config.delta2, config.x_star);
}

/// U = ceil(3 log_{1/rho} n) (or 3 ln(mn)/phi), clipped to [1, n]; n when neither constant is known.
inline std::size_t scan_length_cap(const DetectorConfig& config, std::size_t rows, std::size_t cols) {
  if (config.scan_cap) return std::clamp<std::size_t>(*config.scan_cap, 1, cols);
  double u;
  if (config.rho) {
    u = std::ceil(3.0 * std::log(static_cast<double>(cols)) / std::log(1.0 / config.rho->rho));
  } else if (config.phi) {
    u = std::ceil(3.0 * std::log(static_cast<double>(rows) * static_cast<double>(cols)) / *config.phi);
  } else {
    return cols;
  }
  if (!(u >= 1.0)) return 1;
  return u >= static_cast<double>(cols) ? cols : static_cast<std::size_t>(u);
}

struct DetectionResult {
  bool reject_null = false;
  Stage stage = Stage::none;
  std::size_t l0_length = 0;
  std::optional<double> x_star_s;  // empty when Step I already rejected
  Thresholds thresholds;
  std::size_t scan_cap = 0;
  std::optional<ChainPath> witness;
};

inline DetectionResult detect(const ImageGrid& grid, const DetectorConfig& config) {
  if (grid.cols() < 2) throw argument_error("detect: the raster needs at least 2 columns");
  const auto resolved = resolve(config, grid.rows());
  DetectionResult result;
  result.thresholds = thresholds_for(resolved, grid.rows(), grid.cols());
  result.scan_cap = scan_length_cap(resolved, grid.rows(), grid.cols());

  const auto map = significance_map(grid, resolved.x_star);
  auto run = longest_run_length(map, resolved.drift);
  result.l0_length = run.length;
  if (static_cast<double>(run.length) > result.thresholds.step1) {
    result.reject_null = true;
    result.stage = Stage::step1;
    result.witness = std::move(run.witness);
    return result;
  }

  auto scan = scan_statistic(grid, map, resolved.drift, result.scan_cap);
  result.x_star_s = scan.value;
  if (scan.value > result.thresholds.step2) {
    result.reject_null = true;
    result.stage = Stage::step2;
    result.witness = std::move(scan.arg_chain);
  }
  return result;
}

struct FrameStatistics {
  std::size_t index = 0;
  std::size_t l0_length = 0;
  double x_star_s = unreachable;
  bool alarm = false;
};

/// Both statistics for one frame, without witnesses.
inline FrameStatistics frame_statistics(const ImageGrid& grid, std::size_t drift, double x_star, std::size_t cap) {
  const auto map = significance_map(grid, x_star);
  FrameStatistics stats;
  stats.l0_length = longest_run_length(map, drift, false).length;
  stats.x_star_s = scan_statistic(grid, map, drift, std::min(cap, grid.cols()), false).value;
  return stats;
}

/// alarm = l0 > l0_alarm or X*_s > scan_alarm, frame by frame.
inline std::vector<FrameStatistics> detect_frames(const std::vector<ImageGrid>& frames, const DetectorConfig& config,
                                                  double l0_alarm, double scan_alarm, unsigned threads = 0) {
  std::vector<FrameStatistics> out(frames.size());
  if (frames.empty()) return out;
  const std::size_t rows = frames.front().rows(), cols = frames.front().cols();
  for (std::size_t k = 1; k < frames.size(); ++k) {
    if (frames[k].rows() != rows || frames[k].cols() != cols) {
      throw argument_error("detect_frames: frame " + std::to_string(k) + " is " + std::to_string(frames[k].rows()) +
                           "x" + std::to_string(frames[k].cols()) + ", expected " + std::to_string(rows) + "x" +
                           std::to_string(cols));
    }
  }
  validate(config);
  // rho only sets the scan cap here, so a missing value for m > 20 falls back to U = n.
  DetectorConfig resolved = config;
  if (!resolved.rho && resolved.regime == Regime::fixed_rows && rows <= max_exact_rows) resolved = resolve(config, rows);
  const std::size_t cap = scan_length_cap(resolved, rows, cols);
  parallel_for(frames.size(), threads, [&](std::size_t k) {
    auto stats = frame_statistics(frames[k], resolved.drift, resolved.x_star, cap);
    stats.index = k;
    stats.alarm = static_cast<double>(stats.l0_length) > l0_alarm || stats.x_star_s > scan_alarm;
    out[k] = stats;
  });
  return out;
}

}  // namespace filament
