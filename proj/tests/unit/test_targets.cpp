#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Eigenvalues>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "taumax/datasets.hpp"
#include "taumax/errors.hpp"
#include "taumax/targets.hpp"

namespace taumax {
namespace {

using testing::finite_difference_gradient;

std::vector<std::unique_ptr<Target>> all_targets() {
  std::vector<std::unique_ptr<Target>> out;
  out.push_back(std::make_unique<StdGaussianTarget>(3));
  out.push_back(std::make_unique<LMixtureTarget>());
  const RegressionData d = generate_nn_fixture();
  out.push_back(std::make_unique<OneNodeNNTarget>(d.x, d.y));
  const Dataset ds = parse_australian(synthetic_australian_text(kAustralianRows, 7));
  out.push_back(std::make_unique<LogisticTarget>(ds.rows(ds.train), ds.labels_of(ds.train)));
  return out;
}

TEST(Targets, StdGaussianValues) {
  StdGaussianTarget t(1);
  auto e0 = t.evaluate(Eigen::VectorXd::Zero(1));
  EXPECT_EQ(e0.energy, 0.0);
  EXPECT_EQ(e0.gradient(0), 0.0);
  auto e2 = t.evaluate(Eigen::VectorXd::Constant(1, 2.0));
  EXPECT_DOUBLE_EQ(e2.energy, 2.0);
  EXPECT_DOUBLE_EQ(e2.gradient(0), 2.0);
}

TEST(Targets, LogDensity) {
  EXPECT_EQ(log_density_unnormalized(StdGaussianTarget(1), Eigen::VectorXd::Zero(1)), 0.0);
  EXPECT_DOUBLE_EQ(log_density_unnormalized(StdGaussianTarget(2), Eigen::Vector2d(1, 1)), -1.0);
  const double expected = std::log(std::exp(-0.5 * (36.0 * 9.0 + 9.0)) + 1.0);
  EXPECT_NEAR(log_density_unnormalized(LMixtureTarget(), Eigen::Vector2d(2, 0)), expected, 1e-15);
}

TEST(Targets, LMixtureDeepModeGradient) {
  LMixtureTarget t;
  const Eigen::Vector2d q(-1, 3);
  const auto e = t.evaluate(q);
  EXPECT_LE(e.gradient.norm(), 1e-6);
  EXPECT_LE((e.gradient - finite_difference_gradient(t, q, 1e-6)).norm(), 1e-6);
}

TEST(Targets, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  for (const auto& t : all_targets()) {
    const auto d = static_cast<Eigen::Index>(t->dimension());
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd q(d);
      for (Eigen::Index i = 0; i < d; ++i) q(i) = (t->label() == "logistic" ? 0.3 : 1.5) * normal(gen);
      const Eigen::VectorXd g = t->evaluate(q).gradient;
      const Eigen::VectorXd fd = finite_difference_gradient(*t, q, 1e-5);
      for (Eigen::Index i = 0; i < d; ++i) {
        const double scale = std::max({1.0, std::abs(g(i)), std::abs(fd(i))});
        EXPECT_LE(std::abs(g(i) - fd(i)) / scale, 1e-5) << t->label() << " component " << i;
      }
    }
  }
}

TEST(Targets, LMixtureTwoLocalMaxima) {
  // Gradient descent from a grid of starts lands in exactly two minima of U.
  LMixtureTarget t;
  std::vector<Eigen::Vector2d> minima;
  for (double x = -4; x <= 5; x += 1.0) {
    for (double y = -3; y <= 6; y += 1.0) {
      Eigen::Vector2d q(x, y);
      for (int it = 0; it < 20000; ++it) q -= 0.01 * t.evaluate(Eigen::VectorXd(q)).gradient;
      // Keep only points where the Hessian is positive definite (saddles can
      // attract starts that lie on their stable manifold).
      Eigen::Matrix2d h;
      for (int i = 0; i < 2; ++i) {
        Eigen::Vector2d e = Eigen::Vector2d::Zero();
        e(i) = 1e-5;
        h.col(i) = (t.evaluate(Eigen::VectorXd(q + e)).gradient - t.evaluate(Eigen::VectorXd(q - e)).gradient) / 2e-5;
      }
      if (Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(0.5 * (h + h.transpose())).eigenvalues().minCoeff() <= 0) continue;
      bool known = false;
      for (const auto& m : minima) known = known || (m - q).norm() < 1e-3;
      if (!known) minima.push_back(q);
    }
  }
  // Two deep modes at the component centres, plus a shallow corner mode where
  // both components' narrow directions cross (U ≈ 3.69 there versus ≈ 0).
  ASSERT_EQ(minima.size(), 3u);
  int deep = 0;
  for (const auto& m : minima) {
    const double u = t.evaluate(Eigen::VectorXd(m)).energy;
    if ((m - Eigen::Vector2d(-1, 3)).norm() < 1e-6 || (m - Eigen::Vector2d(2, 0)).norm() < 1e-6) {
      ++deep;
      EXPECT_LT(std::abs(u), 1e-12);
    } else {
      EXPECT_NEAR(m(0), -34.0 / 37.0, 1e-6);
      EXPECT_NEAR(m(1), 3.0 / 37.0, 1e-6);
      EXPECT_GT(u, 3.5);
    }
  }
  EXPECT_EQ(deep, 2);
}

TEST(Targets, LMixtureNoOverflowFarAway) {
  LMixtureTarget t;
  for (double r : {10.0, 100.0, 1000.0}) {
    for (double angle = 0; angle < 6.3; angle += 0.5) {
      const auto e = t.evaluate(Eigen::VectorXd(Eigen::Vector2d(r * std::cos(angle), r * std::sin(angle))));
      EXPECT_TRUE(std::isfinite(e.energy));
      EXPECT_TRUE(e.gradient.allFinite());
    }
  }
}

TEST(Targets, NnSignSymmetryExact) {
  const RegressionData d = generate_nn_fixture();
  OneNodeNNTarget t(d.x, d.y);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Vector4d q(normal(gen), normal(gen), normal(gen), normal(gen));
    Eigen::Vector4d f(-q(0), -q(1), -q(2), q(3));
    EXPECT_NEAR(t.evaluate(Eigen::VectorXd(q)).energy, t.evaluate(Eigen::VectorXd(f)).energy, 1e-12);
  }
}

TEST(Targets, NnPotentialFormula) {
  OneNodeNNTarget t({0.0, 1.0}, {1.0, -1.0});
  const Eigen::Vector4d q(0.5, -0.2, 1.3, 0.1);
  double sse = 0.0;
  for (double x : {0.0, 1.0}) {
    const double y = x == 0.0 ? 1.0 : -1.0;
    const double u = 1.3 * std::tanh(0.5 * x - 0.2) + 0.1;
    sse += (y - u) * (y - u);
  }
  EXPECT_NEAR(t.evaluate(Eigen::VectorXd(q)).energy, 0.5 * 2.5 * sse + 0.5 * 0.8 * q.squaredNorm(), 1e-12);
}

TEST(Targets, LogisticConvexAlongLines) {
  const Dataset ds = parse_australian(synthetic_australian_text(kAustralianRows, 7));
  LogisticTarget t(ds.rows(ds.train), ds.labels_of(ds.train));
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd a(15), b(15);
    for (int i = 0; i < 15; ++i) a(i) = normal(gen), b(i) = normal(gen);
    const double mid = t.evaluate(Eigen::VectorXd(0.5 * (a + b))).energy;
    EXPECT_LE(mid, 0.5 * (t.evaluate(a).energy + t.evaluate(b).energy) + 1e-9);
  }
}

TEST(Targets, LogisticStableForLargeMargins) {
  Eigen::MatrixXd x(2, 1);
  x << 1.0, -1.0;
  LogisticTarget t(x, Eigen::Vector2d(1.0, 0.0));
  const auto e = t.evaluate(Eigen::VectorXd::Constant(1, 800.0));
  EXPECT_TRUE(std::isfinite(e.energy));
  EXPECT_TRUE(e.gradient.allFinite());
  EXPECT_EQ(LogisticTarget::sigmoid(0.0), 0.5);
}

TEST(Targets, DimensionMismatchThrows) {
  StdGaussianTarget t(2);
  EXPECT_THROW(t.evaluate(Eigen::VectorXd::Zero(3)), DimensionError);
  EXPECT_THROW(log_density_unnormalized(LMixtureTarget(), Eigen::VectorXd::Zero(1)), DimensionError);
}

TEST(Targets, FunctionTarget) {
  FunctionTarget t(
      1, "quartic", [](std::span<const double> q) { return q[0] * q[0] * q[0] * q[0]; },
      [](std::span<const double> q, std::span<double> g) { g[0] = 4 * q[0] * q[0] * q[0]; });
  const auto e = t.evaluate(Eigen::VectorXd::Constant(1, 2.0));
  EXPECT_EQ(e.energy, 16.0);
  EXPECT_EQ(e.gradient(0), 32.0);
  EXPECT_EQ(t.label(), "quartic");
}

}  // namespace
}  // namespace taumax
