#include "dicke/errors.hpp"
#include "dicke/spectral.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace dicke;

namespace {

std::vector<double> poisson_levels(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(1.0);
  std::vector<double> e(n);
  double x = 0.0;
  for (auto& v : e) v = (x += gap(rng));
  return e;
}

Eigen::VectorXd goe_spectrum(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = g(rng);
  const Eigen::MatrixXd h = 0.5 * (a + a.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

}  // namespace

TEST(Ratios, Arithmetic) {
  const std::vector<double> even{0, 1, 2, 3};
  const RatioSeries s = consecutive_ratios(even);
  ASSERT_EQ(s.size(), 2u);
  for (double r : s.ratios) EXPECT_DOUBLE_EQ(r, 1.0);
  const std::vector<double> two{0, 1, 3};
  EXPECT_DOUBLE_EQ(consecutive_ratios(two).ratios[0], 0.5);
  EXPECT_DOUBLE_EQ(consecutive_ratios(two).epsilons[0], 1.0);
  EXPECT_THROW(consecutive_ratios(std::vector<double>{0, 1}), ParameterError);
  EXPECT_THROW(consecutive_ratios(std::vector<double>{0, 2, 1}), ParameterError);
}

TEST(Ratios, NearDegeneraciesAreMerged) {
  const std::vector<double> e{0.0, 1.0, 1.0 + 1e-15, 3.0, 3.0, 4.0};
  const RatioSeries s = consecutive_ratios(e);
  EXPECT_EQ(s.merged, 2u);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s.ratios[0], 0.5);
  EXPECT_DOUBLE_EQ(s.ratios[1], 0.5);
  for (double r : s.ratios) {
    EXPECT_GT(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(Ratios, AffineAndReversalInvariance) {
  const auto e = poisson_levels(500, 3);
  const RatioSeries s = consecutive_ratios(e);
  std::vector<double> scaled(e.size()), reversed(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) scaled[k] = 3.7 * e[k] - 12.0;
  for (std::size_t k = 0; k < e.size(); ++k) reversed[k] = -e[e.size() - 1 - k];
  const RatioSeries a = consecutive_ratios(scaled);
  const RatioSeries b = consecutive_ratios(reversed);
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_NEAR(a.ratios[k], s.ratios[k], 1e-10);
    EXPECT_NEAR(b.ratios[s.size() - 1 - k], s.ratios[k], 1e-12);
  }
}

TEST(Ratios, PoissonCalibration) {
  const RatioSeries s = consecutive_ratios(poisson_levels(100002, 42));
  EXPECT_NEAR(mean(s.ratios), kPoissonMeanRatio, 0.005);
}

TEST(Ratios, GoeCalibration) {
  std::mt19937_64 rng(7);
  std::vector<double> r;
  for (int k = 0; k < 100000; ++k) {
    const Eigen::VectorXd e = goe_spectrum(3, rng);
    r.push_back(consecutive_ratios(std::vector<double>(e.data(), e.data() + 3)).ratios[0]);
  }
  EXPECT_NEAR(mean(r), kGoeMeanRatio, 0.01);

  const Eigen::VectorXd big = goe_spectrum(1200, rng);
  const RatioSeries s = consecutive_ratios(std::vector<double>(big.data() + 300, big.data() + 900));
  EXPECT_NEAR(mean(s.ratios), kGoeMeanRatio, 0.03);
}

TEST(Ratios, MixedSectorsDriftTowardPoisson) {
  std::mt19937_64 rng(13);
  const Eigen::VectorXd a = goe_spectrum(800, rng);
  const Eigen::VectorXd b = goe_spectrum(800, rng);
  std::vector<double> one(a.data() + 200, a.data() + 600);
  std::vector<double> both(one);
  both.insert(both.end(), b.data() + 200, b.data() + 600);
  std::sort(both.begin(), both.end());
  const double single = mean(consecutive_ratios(one).ratios);
  const double mixed = mean(consecutive_ratios(both).ratios);
  EXPECT_LT(mixed, single - 0.05);
}

TEST(Windows, ConstantAndFull) {
  RatioSeries s;
  for (int k = 0; k < 300; ++k) {
    s.epsilons.push_back(k);
    s.ratios.push_back(0.42);
  }
  for (const auto& w : windowed_average(s, 50)) EXPECT_NEAR(w.mean, 0.42, 1e-13);
  const auto full = windowed_average(s, 300);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_NEAR(full[0].epsilon, 149.5, 1e-12);
  EXPECT_EQ(windowed_average(s, 1000).size(), 1u);
  EXPECT_EQ(windowed_average(s, 50, 10).size(), 26u);
  EXPECT_THROW(windowed_average(s, 9), ParameterError);
  EXPECT_EQ(default_window(400), 50);
  EXPECT_EQ(default_window(4000), 200);
  EXPECT_NEAR(windowed_mean_in_range(s, 50, 100, 200), 0.42, 1e-13);
  EXPECT_THROW(windowed_mean_in_range(s, 50, 1000, 2000), WindowError);
}

TEST(RatioMap, TavisCummingsSectorIsPoissonLike) {
  // All Lambda blocks of one parity merged: independent sequences.
  const ModelParams p = ModelParams::make(1.0, 1.0, 2.0, 10.0);
  EigenSolution tc = tavis_cummings_spectrum(p, 400, EigenJob::ValuesOnly);
  EigenSolution even = tc;
  even.energies.clear();
  even.parity.clear();
  even.converged.clear();
  for (std::size_t k = 0; k < tc.size(); ++k) {
    if (tc.parity[k] != Parity::Even) continue;
    even.energies.push_back(tc.energies[k]);
    even.parity.push_back(Parity::Even);
    even.converged.push_back(tc.converged[k]);
  }
  const RatioSeries s = converged_ratios(even);
  EXPECT_NEAR(mean(s.ratios), kPoissonMeanRatio, 0.04);
  EXPECT_THROW(converged_ratios(tc), ParameterError);

  const std::vector<EigenSolution> spectra{even};
  const RatioMap m = r_map(spectra, {-5.0, 0.0, 2.0, 1e3});
  EXPECT_TRUE(std::isnan(m.mean(0, 0)));
  EXPECT_TRUE(std::isnan(m.mean(0, 3)));
  EXPECT_NEAR(m.mean(0, 1), kPoissonMeanRatio, 0.1);
  EXPECT_DOUBLE_EQ(m.gamma_grid[0], 2.0);
}
