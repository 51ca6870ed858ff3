#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "filament/detectability.hpp"

using namespace filament;

namespace {

const double kXStar = 1.2816;
const double kRho = 0.2691;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_table(const std::string& name) {
  std::ifstream in(std::string(FILAMENT_TEST_DATA) + "/" + name);
  EXPECT_TRUE(in) << name;
  CsvTable t;
  std::string line;
  std::getline(in, line);
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    auto& row = t.rows.emplace_back();
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
  }
  return t;
}

void expect_table(const MuTable& table, const CsvTable& ref, double tol) {
  ASSERT_EQ(table.cells.size(), ref.rows.size());
  for (std::size_t c = 0; c < table.column_labels.size(); ++c) EXPECT_EQ(table.column_labels[c], ref.header[c + 1]);
  for (std::size_t r = 0; r < ref.rows.size(); ++r) {
    EXPECT_EQ(table.widths[r], ref.rows[r][0]);
    for (std::size_t c = 0; c + 1 < ref.rows[r].size(); ++c) {
      EXPECT_NEAR(table.cells[r][c], ref.rows[r][c + 1], tol) << "n=" << ref.rows[r][0] << " col " << ref.header[c + 1];
    }
  }
}

}  // namespace

TEST(Thresholds, Values) {
  auto t = decision_thresholds(1e3, 10, kRho, 1e-4, 1e-4, kXStar);
  EXPECT_NEAR(t.step2, 4.2920, 1e-3);
  EXPECT_NEAR(t.step1, 5.264, 1e-2);
  EXPECT_NEAR(t.step1, 1.00005 * std::log(1000.0) / std::log(1 / kRho), 1e-12);
  EXPECT_LT(decision_thresholds(1e3, 1, kRho, 1e-4, 1e-4, kXStar).step2, t.step2);
  EXPECT_THROW(decision_thresholds(1e3, 10, 1.0, 1e-4, 1e-4, kXStar), argument_error);
  EXPECT_THROW(decision_thresholds(1e3, 10, kRho, 0.0, 1e-4, kXStar), argument_error);
}

TEST(Thresholds, GrowingRegime) {
  auto t = growing_thresholds(400, 300, 0.8, 1e-4, 1e-4, kXStar);
  EXPECT_NEAR(t.step1, 1.00005 * std::log(120000.0) / 0.8, 1e-12);
  EXPECT_EQ(t.step2, scan_threshold(400, 300, 1e-4));
  EXPECT_THROW(growing_thresholds(400, 300, 0.0, 1e-4, 1e-4, kXStar), argument_error);
}

TEST(PowerLaw, Anchors) {
  EXPECT_NEAR(mu_min_power_law(200, kRho, 1, 0.1, 1e-4, kXStar), 1.2216, 1e-3);
  for (double n : {200.0, 1e4, 1e6}) EXPECT_NEAR(mu_min_power_law(n, kRho, 1, 1, 1e-4, kXStar), 0.6661, 1e-3);
  EXPECT_NEAR(mu_min_power_law(1e6, kRho, 0.5, 1, 1e-4, kXStar), 1.3287, 1e-3);
}

TEST(PowerLaw, Domain) {
  EXPECT_THROW(mu_min_power_law(200, kRho, 1, 1.0 / 200, 1e-4, kXStar), domain_error);
  EXPECT_THROW(mu_min_power_law(200, kRho, 1, 1e-3, 1e-4, kXStar), domain_error);
  EXPECT_THROW(mu_min_power_law(200, 1.2, 1, 0.1, 1e-4, kXStar), domain_error);
  EXPECT_THROW(mu_min_power_law(200, kRho, 1.5, 0.1, 1e-4, kXStar), domain_error);
}

TEST(PowerLaw, TrendsInZetaAndAlpha) {
  for (double n : {200.0, 5e3, 1e6}) {
    double prev = INFINITY;
    for (double zeta : {0.1, 0.2, 0.25, 1.0 / 3, 0.5, 1.0}) {
      double mu = mu_min_power_law(n, kRho, 1, zeta, 1e-4, kXStar);
      EXPECT_LT(mu, prev);
      prev = mu;
    }
    EXPECT_GT(mu_min_power_law(n, kRho, 0.5, 0.5, 1e-4, kXStar), mu_min_power_law(n, kRho, 0.8, 0.5, 1e-4, kXStar));
  }
}

// Decreasing in n below zeta = 1, flat at zeta = 1, increasing above.
TEST(PowerLaw, TrendInWidth) {
  const std::vector<double> ns{1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
  for (double zeta : {0.1, 0.5, 1.0, 2.0, 50.0}) {
    for (std::size_t k = 1; k < ns.size(); ++k) {
      double a = mu_min_power_law(ns[k - 1], kRho, 0.5, zeta, 1e-4, kXStar);
      double b = mu_min_power_law(ns[k], kRho, 0.5, zeta, 1e-4, kXStar);
      if (zeta < 1) EXPECT_LT(b, a) << zeta;
      else if (zeta > 1) EXPECT_GT(b, a) << zeta;
      else EXPECT_NEAR(b, a, 1e-12);
    }
  }
}

TEST(LogLength, Anchors) {
  EXPECT_NEAR(mu_min_log_length(1e3, 10, 1, 1e-4, kXStar), 1.83, 0.02);
  EXPECT_NEAR(mu_min_log_length(1e8, 10, 100, 1e-4, kXStar), 1.61, 0.02);
}

TEST(LogLength, Trends) {
  const std::vector<double> ns{1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
  for (std::size_t k = 0; k < ns.size(); ++k) {
    EXPECT_LT(mu_min_log_length(ns[k], 10, 10, 1e-4, kXStar), mu_min_log_length(ns[k], 10, 1, 1e-4, kXStar));
    if (k > 0) {
      EXPECT_GT(mu_min_log_length(ns[k], 10, 5, 1e-4, kXStar), mu_min_log_length(ns[k - 1], 10, 5, 1e-4, kXStar));
    }
  }
}

TEST(LogLength, Domain) {
  EXPECT_THROW(mu_min_log_length(1e3, 10, 0.1, 1e-4, kXStar), domain_error);
  EXPECT_THROW(mu_min_log_length(1e3, 10, -1, 1e-4, kXStar), domain_error);
  EXPECT_THROW(mu_min_log_length(1e3, 10, 1, 0.0, kXStar), domain_error);
}

TEST(LogLength, RootSitsOnTheBoundary) {
  for (double n : {1e3, 1e5, 1e8}) {
    for (double c : {1.0, 10.0, 100.0}) {
      double mu = mu_min_log_length(n, 10, c, 1e-4, kXStar);
      double target = std::sqrt((2 + 1e-4) * std::log(10 * n));
      EXPECT_GT(scan_signal(mu, c * std::log(n), kXStar), target);
      EXPECT_LE(scan_signal(mu - 2e-6, c * std::log(n), kXStar), target);
    }
  }
}

TEST(PowerLaw, InducedP1MatchesRequirement) {
  for (double n : linear_widths()) {
    for (double zeta : {0.1, 0.5, 1.0}) {
      double mu = mu_min_power_law(n, kRho, 1, zeta, 1e-4, kXStar);
      double p1 = normal_sf(kXStar - mu);
      double t = std::pow(kRho, std::log(zeta * n) / (1.0001 * std::log(n)));
      EXPECT_NEAR(p1, t, 1e-6);
    }
  }
}

TEST(Tables, LinearLength) { expect_table(power_law_table(kRho, 1, 1e-4, kXStar), read_table("mu_power.csv"), 1e-3); }

TEST(Tables, SqrtLength) { expect_table(sqrt_length_table(kRho, 1e-4, kXStar), read_table("mu_sqrt.csv"), 1e-3); }

TEST(Tables, LogLength) { expect_table(log_length_table(10, 1e-4, kXStar), read_table("mu_log.csv"), 0.02); }

TEST(Tables, SqrtScanIsLooser) {
  auto step1 = sqrt_length_table(kRho, 1e-4, kXStar);
  auto scan = sqrt_scan_table(10, 1e-4, kXStar);
  ASSERT_EQ(scan.cells.size(), step1.cells.size());
  for (std::size_t r = 0; r < scan.cells.size(); ++r) {
    for (std::size_t c = 0; c < scan.cells[r].size(); ++c) EXPECT_GT(scan.cells[r][c], step1.cells[r][c]);
  }
}
