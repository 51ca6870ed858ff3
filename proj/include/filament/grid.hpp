#pragma once

// Raster and chain types, plus synthetic data for the null and planted-chain
// hypotheses.
//
// Coordinates are 0-based. Rows are the short axis (drift is bounded along
// it); columns are the traversal axis, and a chain advances exactly one column
// per node. Storage is column-major because every dynamic program in this
// library sweeps column by column.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "filament/error.hpp"
#include "filament/random.hpp"

namespace filament {

class ImageGrid {
 public:
  ImageGrid() = default;

  ImageGrid(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(checked_size(rows, cols), fill) {
    if (!std::isfinite(fill)) throw argument_error("ImageGrid: fill value must be finite");
  }

  /// `column_major[col * rows + row]` is the intensity at (row, col).
  ImageGrid(std::size_t rows, std::size_t cols, std::vector<double> column_major)
      : rows_(rows), cols_(cols), values_(std::move(column_major)) {
    if (values_.size() != checked_size(rows, cols)) {
      throw argument_error("ImageGrid: expected " + std::to_string(rows * cols) + " values, got " +
                           std::to_string(values_.size()));
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw argument_error("ImageGrid: non-finite intensity");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t row, std::size_t col) const noexcept { return values_[col * rows_ + row]; }

  std::span<const double> column(std::size_t col) const noexcept {
    return {values_.data() + col * rows_, rows_};
  }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const ImageGrid&) const = default;

 private:
  static std::size_t checked_size(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw argument_error("ImageGrid: dimensions must be positive");
    return rows * cols;
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Chain of good continuation: one node per column over consecutive columns.
struct ChainPath {
  std::size_t start_col = 0;
  std::vector<std::size_t> rows;

  std::size_t length() const noexcept { return rows.size(); }
  std::size_t end_col() const noexcept { return start_col + rows.size() - 1; }

  bool operator==(const ChainPath&) const = default;
};

/// True when `chain` is nonempty, fits in a rows x cols raster and every step
/// drifts by at most `drift` rows.
inline bool is_valid_chain(const ChainPath& chain, std::size_t rows, std::size_t cols, std::size_t drift) {
  if (chain.rows.empty() || chain.start_col >= cols) return false;
  if (chain.rows.size() > cols - chain.start_col) return false;
  for (std::size_t k = 0; k < chain.rows.size(); ++k) {
    if (chain.rows[k] >= rows) return false;
    if (k > 0) {
      auto a = chain.rows[k], b = chain.rows[k - 1];
      if ((a > b ? a - b : b - a) > drift) return false;
    }
  }
  return true;
}

/// Boolean raster of significant nodes, column-major like ImageGrid.
class SignificanceMap {
 public:
  SignificanceMap() = default;

  SignificanceMap(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {
    if (rows == 0 || cols == 0) throw argument_error("SignificanceMap: dimensions must be positive");
  }

  SignificanceMap(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> column_major)
      : rows_(rows), cols_(cols), bits_(std::move(column_major)) {
    if (rows == 0 || cols == 0) throw argument_error("SignificanceMap: dimensions must be positive");
    if (bits_.size() != rows * cols) throw argument_error("SignificanceMap: bit count does not match dimensions");
    for (auto& b : bits_) b = b ? 1 : 0;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  bool operator()(std::size_t row, std::size_t col) const noexcept { return bits_[col * rows_ + row] != 0; }
  void set(std::size_t row, std::size_t col, bool value) noexcept { bits_[col * rows_ + row] = value ? 1 : 0; }

  std::span<const std::uint8_t> column(std::size_t col) const noexcept {
    return {bits_.data() + col * rows_, rows_};
  }

  std::size_t count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  bool operator==(const SignificanceMap&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// z(i,j) = [X(i,j) > x_star]; ties are insignificant.
inline SignificanceMap significance_map(const ImageGrid& grid, double x_star) {
  SignificanceMap map(grid.rows(), grid.cols());
  for (std::size_t c = 0; c < grid.cols(); ++c) {
    auto col = grid.column(c);
    for (std::size_t r = 0; r < grid.rows(); ++r) map.set(r, c, col[r] > x_star);
  }
  return map;
}

inline bool chain_is_significant(const SignificanceMap& map, const ChainPath& chain) {
  for (std::size_t k = 0; k < chain.rows.size(); ++k) {
    if (!map(chain.rows[k], chain.start_col + k)) return false;
  }
  return true;
}

inline double chain_sum(const ImageGrid& grid, const ChainPath& chain) {
  double sum = 0.0;
  for (std::size_t k = 0; k < chain.rows.size(); ++k) sum += grid(chain.rows[k], chain.start_col + k);
  return sum;
}

/// I.i.d. N(0,1) raster; identical seeds give identical grids.
inline ImageGrid generate_null_grid(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw argument_error("generate_null_grid: dimensions must be positive");
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(rows * cols);
  for (auto& v : values) v = normal(rng);
  return ImageGrid(rows, cols, std::move(values));
}

/// I.i.d. Bernoulli(p) significance indicators, i.e. a thresholded null grid
/// without materializing intensities.
inline SignificanceMap bernoulli_map(std::size_t rows, std::size_t cols, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw argument_error("bernoulli_map: p must lie in [0, 1]");
  SignificanceMap map(rows, cols);
  auto rng = make_rng(seed);
  std::bernoulli_distribution coin(p);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) map.set(r, c, coin(rng));
  }
  return map;
}

/// Random chain: uniform start column and start row, then uniform drift in
/// [-drift, drift] per step, clipped to the raster.
inline ChainPath generate_chain(std::size_t rows, std::size_t cols, std::size_t drift, std::size_t length,
                                std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw argument_error("generate_chain: dimensions must be positive");
  if (length == 0 || length > cols) {
    throw argument_error("generate_chain: length " + std::to_string(length) + " outside [1, " +
                         std::to_string(cols) + "]");
  }
  auto rng = make_rng(seed);
  ChainPath chain;
  chain.start_col = std::uniform_int_distribution<std::size_t>(0, cols - length)(rng);
  chain.rows.reserve(length);
  auto row = static_cast<long long>(std::uniform_int_distribution<std::size_t>(0, rows - 1)(rng));
  const auto d = static_cast<long long>(drift);
  std::uniform_int_distribution<long long> step(-d, d);
  chain.rows.push_back(static_cast<std::size_t>(row));
  for (std::size_t k = 1; k < length; ++k) {
    row = std::clamp(row + step(rng), 0LL, static_cast<long long>(rows) - 1);
    chain.rows.push_back(static_cast<std::size_t>(row));
  }
  return chain;
}

/// Adds `mu` at every node of `chain`; all other intensities are untouched.
inline ImageGrid embed_chain(const ImageGrid& grid, const ChainPath& chain, double mu) {
  if (chain.rows.empty() || chain.start_col >= grid.cols() || chain.rows.size() > grid.cols() - chain.start_col) {
    throw argument_error("embed_chain: chain columns fall outside the grid");
  }
  std::vector<double> values(grid.values().begin(), grid.values().end());
  for (std::size_t k = 0; k < chain.rows.size(); ++k) {
    if (chain.rows[k] >= grid.rows()) throw argument_error("embed_chain: chain row outside the grid");
    values[(chain.start_col + k) * grid.rows() + chain.rows[k]] += mu;
  }
  return ImageGrid(grid.rows(), grid.cols(), std::move(values));
}

}  // namespace filament
