#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "taumax/errors.hpp"
#include "taumax/samplers.hpp"
#include "taumax/tau_max.hpp"
#include "taumax/window.hpp"
#include "window_select.hpp"

namespace taumax {
namespace {

using testing::ar1_series;

CovSeq exact_cov(double lambda, double c0, std::size_t lags) {
  CovSeq c;
  c.n_samples = 1000000;
  c.values = testing::ar1_covariances(lambda, c0, lags);
  return c;
}

std::vector<double> iid(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<double> x(n);
  for (double& v : x) v = normal(gen);
  return x;
}

std::vector<double> gaussian_chain_q(std::size_t n, std::uint64_t seed) {
  ChainConfig c;
  c.step_size = 0.02;
  c.stride = 5;
  c.n_steps = 5 * n;
  c.seed = seed;
  const Trajectory t = run_chain(StdGaussianTarget(1), SamplerKind::em, c, Eigen::VectorXd::Zero(1));
  return std::vector<double>(t.states.data(), t.states.data() + t.states.size());
}

void expect_valid_window(const LagWindow& w) {
  for (std::size_t k = 0; k < w.weights.size(); ++k) {
    EXPECT_GE(w.weights[k], 0.0);
    EXPECT_LE(w.weights[k], 1.0);
    if (k > 0) {
      EXPECT_LE(w.weights[k], w.weights[k - 1]);
    }
    if (static_cast<double>(k) <= w.m) {
      EXPECT_EQ(w.weights[k], 1.0) << k;
    }
  }
}

TEST(Window, FitNoiseless) {
  const AcfFit f = fit_exponential_acf(exact_cov(0.9, 0.5, 50), 50);
  EXPECT_NEAR(f.lambda, 0.9, 1e-6);
  EXPECT_NEAR(f.c0, 0.5, 1e-6);
  EXPECT_LE(f.sigma, 1e-8);
  EXPECT_EQ(f.lags, 50u);
}

TEST(Window, FitWithNoise) {
  std::mt19937_64 gen(1234);
  std::normal_distribution<double> normal;
  CovSeq c = exact_cov(0.9, 0.5, 50);
  for (double& v : c.values) v += 0.01 * 0.5 * normal(gen);
  const AcfFit f = fit_exponential_acf(c, 50);
  EXPECT_NEAR(f.lambda, 0.9, 0.05);
  EXPECT_NEAR(f.sigma, 0.01, 0.005);
  EXPECT_GT(f.c0, 0.0);
}

TEST(Window, FitPreconditions) {
  EXPECT_THROW(fit_exponential_acf(exact_cov(0.9, 1.0, 50), 2), ConfigError);
  EXPECT_THROW(fit_exponential_acf(exact_cov(0.9, 1.0, 10), 20), ConfigError);
  CovSeq alternating;
  alternating.values = {1.0, -0.9, 0.81, -0.729, 0.6561};
  EXPECT_THROW(fit_exponential_acf(alternating, 5), DegenerateSeriesError);
}

TEST(Window, OffsetSmallSigma) {
  const WindowOffset w = optimal_window_offset(AcfFit{0.9, 1.0, 1e-8, 50});
  EXPECT_LE(w.mu, 1e-3);
  EXPECT_EQ(w.status, TauStatus::ok);
  EXPECT_NEAR(w.m, std::log(w.mu) / std::log(0.9), 1e-9 * std::abs(w.m));
}

TEST(Window, OffsetMatchesDirectMinimizer) {
  for (double lambda : {0.5, 0.9, 0.97}) {
    for (double sigma : {0.01, 0.1, 0.5}) {
      const WindowOffset w = optimal_window_offset(AcfFit{lambda, 1.0, sigma, 50});
      const double oracle = testing::minimize_window_error(lambda, 1.0, sigma);
      EXPECT_NEAR(w.mu, oracle, 1e-8 * std::max(1.0, oracle)) << lambda << " " << sigma;
    }
  }
}

TEST(Window, OffsetLargeSigmaInsufficient) {
  const WindowOffset w = optimal_window_offset(AcfFit{0.99, 1.0, 10.0, 50});
  EXPECT_GT(w.mu, 1.0);
  EXPECT_EQ(w.status, TauStatus::insufficient_samples);
  EXPECT_GT(testing::minimize_window_error(0.99, 1.0, 10.0, 100.0), 1.0);
  EXPECT_NEAR(w.mu, testing::minimize_window_error(0.99, 1.0, 10.0, 100.0), 1e-8 * w.mu);
}

TEST(Window, OffsetValidation) {
  EXPECT_THROW(optimal_window_offset(AcfFit{1.0, 1.0, 0.1, 50}), ConfigError);
  EXPECT_THROW(optimal_window_offset(AcfFit{0.0, 1.0, 0.1, 50}), ConfigError);
  EXPECT_THROW(optimal_window_offset(AcfFit{0.5, 1.0, -0.1, 50}), ConfigError);
  EXPECT_THROW(optimal_window_offset(AcfFit{0.5, 0.0, 0.1, 50}), ConfigError);
}

TEST(Window, WeightsAndTail) {
  const std::vector<double> w = detail::window_weights(0.8, 3.5, 10);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_DOUBLE_EQ(w[k], std::min(1.0, std::pow(0.8, k - 3.5)));
  for (double m : {0.0, 2.5, 7.0, 40.0}) {
    long double brute = 0.0L;
    for (std::size_t k = 10; k < 20000; ++k) brute += std::min(1.0, std::pow(0.8, k - m)) * std::pow(0.8, k);
    EXPECT_NEAR(detail::model_tail_sum(0.8, m, 10), static_cast<double>(brute), 1e-12) << m;
  }
}

TEST(Window, IidTau) {
  const TauEstimate e = estimate_tau(iid(100000, 3));
  EXPECT_GE(e.tau, 0.9);
  EXPECT_LE(e.tau, 1.1);
  EXPECT_EQ(e.n_samples, 100000u);
  EXPECT_EQ(e.doubling_levels, 1u);
  expect_valid_window(e.window);
}

TEST(Window, Ar1Tau) {
  const std::vector<double> x = ar1_series(0.9, 1000000, 21);
  const TauEstimate e = estimate_tau(x);
  EXPECT_NEAR(e.tau, 19.0, 1.9);
  EXPECT_EQ(e.status, TauStatus::ok);
  EXPECT_NEAR(e.ess * e.tau, 1e6, 1e-9 * 1e6);
  expect_valid_window(e.window);
}

TEST(Window, GaussianChainTau) {
  const TauEstimate e = estimate_tau(gaussian_chain_q(1000000, 4));
  EXPECT_NEAR(e.tau, tau_from_ar1(std::exp(-0.1)), 2.0);
}

TEST(Window, ScaleInvariant) {
  const std::vector<double> x = ar1_series(0.7, 20000, 8);
  const double base = estimate_tau(x).tau;
  for (double c : {-3.0, 1e-6, 1e5}) {
    std::vector<double> y(x);
    for (double& v : y) v *= c;
    EXPECT_NEAR(estimate_tau(y).tau, base, 1e-9 * base) << c;
  }
}

TEST(Window, WindowValidityProperty) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const double lambda = 0.1 + 0.03 * static_cast<double>(seed);
    const std::size_t n = 200 + 500 * seed;
    for (std::size_t levels : {0u, 1u, 2u}) {
      TauOptions o;
      o.doubling_levels = levels;
      const TauEstimate e = estimate_tau(ar1_series(lambda, n, seed), o);
      expect_valid_window(e.window);
      EXPECT_GE(e.tau, 0.0);
      EXPECT_EQ(e.window.weights.size(), e.acf.size());
      if (std::isfinite(e.ess)) {
        EXPECT_NEAR(e.ess * e.tau, static_cast<double>(n), 1e-9 * static_cast<double>(n));
      }
    }
  }
}

TEST(Window, DegenerateAndShort) {
  const std::vector<double> flat(100, 2.0);
  const TauEstimate e = estimate_tau(flat);
  EXPECT_EQ(e.status, TauStatus::degenerate);
  EXPECT_EQ(e.tau, 1.0);
  EXPECT_THROW(estimate_tau(std::vector<double>(15, 1.0)), DimensionError);
  EXPECT_THROW(variance_of_mean(flat), DegenerateSeriesError);
}

TEST(Window, LagRule) {
  EXPECT_EQ(default_max_lags(100), 20u);
  EXPECT_EQ(default_max_lags(10), 10u);
  EXPECT_EQ(default_max_lags(1001), 101u);
  EXPECT_EQ(default_max_lags(100000000), 2000u);
}

TEST(Window, AcorIid) {
  const TauEstimate e = estimate_tau_acor(iid(100000, 5));
  EXPECT_GE(e.tau, 0.8);
  EXPECT_LE(e.tau, 1.2);
  EXPECT_EQ(e.status, TauStatus::ok);
}

TEST(Window, AcorAr1) {
  const TauEstimate e = estimate_tau_acor(ar1_series(0.9, 1000000, 22));
  EXPECT_NEAR(e.tau, 19.0, 0.15 * 19.0);
  EXPECT_EQ(e.status, TauStatus::ok);
  // Rectangular window just above 10τ.
  EXPECT_GT(static_cast<double>(e.window.weights.size()), 10.0 * e.tau);
}

TEST(Window, AcorInsufficient) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    EXPECT_EQ(estimate_tau_acor(ar1_series(0.99, 1000, seed)).status, TauStatus::insufficient_samples) << seed;
  }
}

TEST(Window, VarianceOfMean) {
  const double v = variance_of_mean(iid(10000, 6));
  EXPECT_NEAR(v, 1e-4, 0.2e-4);
  const std::vector<double> x = ar1_series(0.9, 1000000, 23);
  const double c0 = autocovariance(x, 1)[0];
  EXPECT_NEAR(variance_of_mean(x), 19.0 * c0 / 1e6, 0.15 * 19.0 * c0 / 1e6);
}

TEST(Window, NewWindowLessNoisyOnGaussianChain) {
  std::vector<double> fresh, acor;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::vector<double> q = gaussian_chain_q(1000000, 100 + seed);
    fresh.push_back(estimate_tau(q).tau);
    acor.push_back(estimate_tau_acor(q).tau);
  }
  EXPECT_LE(testing::sample_sd(fresh), 1.1 * testing::sample_sd(acor));
}

}  // namespace
}  // namespace taumax
