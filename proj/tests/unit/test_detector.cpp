#include <gtest/gtest.h>

#include <cmath>

#include "filament/detector.hpp"

using namespace filament;

namespace {

DetectorConfig defaults() {
  DetectorConfig c;
  c.x_star = 1.2816;
  return c;
}

void expect_consistent(const DetectionResult& r) {
  EXPECT_EQ(r.reject_null, r.stage != Stage::none);
  switch (r.stage) {
    case Stage::step1:
      EXPECT_GT(static_cast<double>(r.l0_length), r.thresholds.step1);
      EXPECT_FALSE(r.x_star_s);
      ASSERT_TRUE(r.witness);
      EXPECT_EQ(r.witness->length(), r.l0_length);
      break;
    case Stage::step2:
      ASSERT_TRUE(r.x_star_s);
      EXPECT_GT(*r.x_star_s, r.thresholds.step2);
      EXPECT_LE(static_cast<double>(r.l0_length), r.thresholds.step1);
      ASSERT_TRUE(r.witness);
      break;
    case Stage::none:
      ASSERT_TRUE(r.x_star_s);
      EXPECT_LE(*r.x_star_s, r.thresholds.step2);
      EXPECT_LE(static_cast<double>(r.l0_length), r.thresholds.step1);
      EXPECT_FALSE(r.witness);
      break;
  }
}

double rejection_rate(std::size_t m, std::size_t n, double mu, std::size_t len, std::size_t trials,
                      std::uint64_t seed) {
  auto config = resolve(defaults(), m);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    auto grid = generate_null_grid(m, n, substream_seed(seed, t));
    if (mu > 0) grid = embed_chain(grid, generate_chain(m, n, 1, len, substream_seed(seed + 1, t)), mu);
    auto r = detect(grid, config);
    expect_consistent(r);
    hits += r.reject_null;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace

TEST(Detector, PlantedChainOnZeroGrid) {
  ChainPath chain{0, std::vector<std::size_t>(60)};
  for (std::size_t k = 0; k < 60; ++k) chain.rows[k] = 3 + (k / 7) % 2;
  auto r = detect(embed_chain(ImageGrid(10, 60), chain, 4.0), defaults());
  EXPECT_TRUE(r.reject_null);
  EXPECT_EQ(r.stage, Stage::step1);
  EXPECT_EQ(r.l0_length, 60u);
  EXPECT_EQ(*r.witness, chain);
  expect_consistent(r);
}

TEST(Detector, PlantedChainInNoise) {
  EXPECT_GE(rejection_rate(10, 60, 4.0, 60, 100, 21), 0.99);
}

TEST(Detector, NothingSignificant) {
  auto r = detect(ImageGrid(10, 50), defaults());
  EXPECT_FALSE(r.reject_null);
  EXPECT_EQ(r.stage, Stage::none);
  EXPECT_EQ(r.l0_length, 0u);
  ASSERT_TRUE(r.x_star_s);
  EXPECT_EQ(*r.x_star_s, unreachable);
  EXPECT_FALSE(r.witness);
}

TEST(Detector, ThresholdsAndCap) {
  auto r = detect(generate_null_grid(10, 1000, 1), defaults());
  const double rho = exact_rho(10, 1, normal_sf(1.2816)).rho;
  EXPECT_NEAR(r.thresholds.step1, 1.00005 * std::log(1000.0) / std::log(1 / rho), 1e-9);
  EXPECT_NEAR(r.thresholds.step2, std::sqrt(2.0002 * std::log(1e4)), 1e-12);
  EXPECT_EQ(r.scan_cap, static_cast<std::size_t>(std::ceil(3 * std::log(1000.0) / std::log(1 / rho))));
  auto capped = defaults();
  capped.scan_cap = 5000;
  EXPECT_EQ(detect(generate_null_grid(10, 1000, 1), capped).scan_cap, 1000u);
}

TEST(Detector, Deterministic) {
  auto g = generate_null_grid(10, 3000, 4);
  auto a = detect(g, defaults()), b = detect(g, defaults());
  EXPECT_EQ(a.reject_null, b.reject_null);
  EXPECT_EQ(a.stage, b.stage);
  EXPECT_EQ(a.l0_length, b.l0_length);
  EXPECT_EQ(a.x_star_s, b.x_star_s);
  EXPECT_EQ(a.witness, b.witness);
}

TEST(Detector, GuardAndProvenance) {
  auto c = defaults();
  c.x_star = 0.4;  // p ~ 0.345 >= 1/3
  EXPECT_THROW(detect(ImageGrid(4, 10), c), config_error);
  c.x_star = 1.2816;
  c.drift = 2;  // p = 0.1 < 1/5 still fine
  EXPECT_NO_THROW(detect(ImageGrid(4, 10), c));
  c.drift = 5;  // 1/11 < p fails
  EXPECT_THROW(detect(ImageGrid(4, 10), c), config_error);

  auto wrong = defaults();
  wrong.rho = exact_rho(8, 1, normal_sf(1.2816));
  EXPECT_THROW(detect(ImageGrid(10, 10), wrong), config_error);
  EXPECT_THROW(detect(ImageGrid(21, 10), defaults()), config_error);
  EXPECT_THROW(detect(ImageGrid(4, 1), defaults()), argument_error);

  auto supplied = defaults();
  supplied.rho = RhoValue{0.3, 30, 1, normal_sf(1.2816), RhoMethod::supplied};
  EXPECT_NO_THROW(detect(generate_null_grid(30, 100, 2), supplied));
}

TEST(Detector, GrowingRegime) {
  auto c = defaults();
  c.regime = Regime::growing_rows;
  EXPECT_THROW(detect(generate_null_grid(40, 40, 1), c), config_error);
  c.phi = 0.9;
  auto r = detect(generate_null_grid(40, 40, 1), c);
  EXPECT_NEAR(r.thresholds.step1, 1.00005 * std::log(1600.0) / 0.9, 1e-12);
  EXPECT_EQ(r.scan_cap, static_cast<std::size_t>(std::ceil(3 * std::log(1600.0) / 0.9)));
  expect_consistent(r);
}

TEST(Detector, ResultInvariantsUnderBothHypotheses) {
  rejection_rate(10, 400, 0.0, 0, 60, 3);
  rejection_rate(10, 400, 1.0, 40, 60, 4);
  rejection_rate(6, 300, 2.0, 8, 60, 5);
}

// Finite-n null rate of the default configuration.
TEST(Detector, NullAcceptanceRate) {
  EXPECT_LE(rejection_rate(10, 2000, 0.0, 0, 200, 11), 0.10);
}

TEST(Detector, PowerMonotoneInMean) {
  double prev = 0.0, prev_se = 0.0;
  for (double mu : {0.5, 1.5, 2.5, 4.0}) {
    double rate = rejection_rate(10, 300, mu, 60, 200, 6);
    double se = std::sqrt(rate * (1 - rate) / 200);
    EXPECT_GE(rate + 2 * std::hypot(se, prev_se), prev) << mu;
    prev = rate;
    prev_se = se;
  }
}

TEST(Detector, NullRateFallsWithWidth) {
  double small = rejection_rate(10, 500, 0.0, 0, 200, 8), large = rejection_rate(10, 5000, 0.0, 0, 200, 9);
  double slack = 2 * std::hypot(std::sqrt(small * (1 - small) / 200), std::sqrt(large * (1 - large) / 200));
  EXPECT_GE(small + slack, large);
}

TEST(Frames, EmptyAndMismatch) {
  EXPECT_TRUE(detect_frames({}, defaults(), 1, 1).empty());
  std::vector<ImageGrid> frames{ImageGrid(5, 5), ImageGrid(5, 6)};
  EXPECT_THROW(detect_frames(frames, defaults(), 1, 1), argument_error);
}

TEST(Frames, NullFramesAtFixedAlarms) {
  std::vector<ImageGrid> frames;
  for (std::uint64_t k = 0; k < 50; ++k) frames.push_back(generate_null_grid(50, 50, 100 + k));
  auto stats = detect_frames(frames, defaults(), 69, 7.7);
  ASSERT_EQ(stats.size(), 50u);
  for (std::size_t k = 0; k < stats.size(); ++k) {
    EXPECT_EQ(stats[k].index, k);
    EXPECT_FALSE(stats[k].alarm);
  }
}

TEST(Frames, BurstIsFlagged) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<ImageGrid> frames;
    for (std::uint64_t k = 0; k < 50; ++k) {
      auto g = generate_null_grid(50, 50, substream_seed(seed, k));
      if (k >= 20 && k <= 25) g = embed_chain(g, generate_chain(50, 50, 1, 30, substream_seed(seed + 1000, k)), 3.0);
      frames.push_back(std::move(g));
    }
    auto stats = detect_frames(frames, defaults(), 69, 7.7, 2);
    int inside = 0;
    for (const auto& s : stats) {
      if (s.index >= 20 && s.index <= 25) inside += s.alarm;
      else EXPECT_FALSE(s.alarm) << "seed " << seed << " frame " << s.index;
    }
    EXPECT_GE(inside, 5) << "seed " << seed;
  }
}

TEST(Frames, StatisticsMatchSingleFrameRoutines) {
  std::vector<ImageGrid> frames;
  for (std::uint64_t k = 0; k < 5; ++k) frames.push_back(generate_null_grid(8, 200, k));
  auto stats = detect_frames(frames, defaults(), 5, 3.5, 3);
  auto config = resolve(defaults(), 8);
  const std::size_t cap = scan_length_cap(config, 8, 200);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    auto z = significance_map(frames[k], 1.2816);
    EXPECT_EQ(stats[k].l0_length, longest_run_length(z, 1).length);
    EXPECT_EQ(stats[k].x_star_s, scan_statistic(frames[k], z, 1, cap).value);
    EXPECT_EQ(stats[k].alarm, stats[k].l0_length > 5 || stats[k].x_star_s > 3.5);
  }
}
