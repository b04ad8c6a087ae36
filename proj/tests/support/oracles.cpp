#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

namespace taumax::testing {

std::vector<double> direct_autocovariance(std::span<const double> x, std::size_t lags) {
  const std::size_t n = x.size();
  long double mean = 0.0L;
  for (double v : x) mean += v;
  mean /= static_cast<long double>(n);
  std::vector<double> out(lags);
  for (std::size_t k = 0; k < lags; ++k) {
    long double s = 0.0L;
    for (std::size_t i = 0; i + k < n; ++i) s += (x[i] - mean) * (x[i + k] - mean);
    out[k] = static_cast<double>(s / static_cast<long double>(n));
  }
  return out;
}

Eigen::MatrixXd direct_cross_covariance(const Eigen::MatrixXd& x, std::size_t k) {
  const Eigen::Index d = x.rows();
  const Eigen::Index n = x.cols();
  const Eigen::MatrixXd c = x.colwise() - x.rowwise().mean();
  Eigen::MatrixXd out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      long double s = 0.0L;
      for (Eigen::Index t = 0; t + static_cast<Eigen::Index>(k) < n; ++t) s += c(i, t) * c(j, t + static_cast<Eigen::Index>(k));
      out(i, j) = static_cast<double>(s / static_cast<long double>(n));
    }
  }
  return out;
}

std::vector<double> ar1_series(double lambda, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<double> x(n);
  const double s = std::sqrt(1.0 - lambda * lambda);
  x[0] = normal(gen);
  for (std::size_t i = 1; i < n; ++i) x[i] = lambda * x[i - 1] + s * normal(gen);
  return x;
}

std::vector<double> ar1_covariances(double lambda, double c0, std::size_t lags) {
  std::vector<double> c(lags);
  for (std::size_t k = 0; k < lags; ++k) c[k] = c0 * std::pow(lambda, static_cast<double>(k));
  return c;
}

double dense_gev_max(const Eigen::MatrixXd& k, const Eigen::MatrixXd& c0) {
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(0.5 * (k + k.transpose()), c0, false);
  const Eigen::VectorXcd alphas = ges.alphas();
  const Eigen::VectorXd betas = ges.betas();
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < alphas.size(); ++i) best = std::max(best, alphas(i).real() / betas(i));
  return best;
}

double sampled_rayleigh_max(const Eigen::MatrixXd& k, const Eigen::MatrixXd& c0, std::size_t samples,
                            std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd a(k.rows());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = normal(gen);
    a.normalize();
    best = std::max(best, a.dot(k * a) / a.dot(c0 * a));
  }
  return best;
}

Eigen::MatrixXd random_spd(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = normal(gen);
  return b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

long double window_error(long double mu, long double lambda, long double c0, long double sigma) {
  const long double l2 = 1.0L - lambda * lambda;
  const long double a = 4.0L * c0 * lambda * lambda / (l2 * l2);
  const long double s2 = sigma * sigma;
  return a * (mu * mu + s2 * (1.0L + lambda - mu) * (1.0L + lambda - mu)) + 4.0L * s2 * std::log(mu) / std::log(lambda) -
         4.0L * s2 / l2;
}

double minimize_window_error(double lambda, double c0, double sigma, double hi) {
  // Scan in log μ, then golden-section refinement around the best grid point.
  const int grid = 20000;
  const long double lo_log = -60.0L;
  const long double hi_log = std::log(static_cast<long double>(hi));
  int best = 0;
  long double best_val = std::numeric_limits<long double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const long double t = lo_log + (hi_log - lo_log) * i / grid;
    const long double v = window_error(std::exp(t), lambda, c0, sigma);
    if (v < best_val) best_val = v, best = i;
  }
  long double a = lo_log + (hi_log - lo_log) * std::max(0, best - 1) / grid;
  long double b = lo_log + (hi_log - lo_log) * std::min(grid, best + 1) / grid;
  const long double g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  for (int it = 0; it < 200; ++it) {
    const long double x1 = b - g * (b - a);
    const long double x2 = a + g * (b - a);
    if (window_error(std::exp(x1), lambda, c0, sigma) < window_error(std::exp(x2), lambda, c0, sigma)) {
      b = x2;
    } else {
      a = x1;
    }
  }
  return static_cast<double>(std::exp(0.5L * (a + b)));
}

Eigen::VectorXd finite_difference_gradient(const Target& target, const Eigen::VectorXd& q, double h) {
  Eigen::VectorXd g(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    Eigen::VectorXd p = q, m = q;
    p(i) += h;
    m(i) -= h;
    g(i) = (target.evaluate(p).energy - target.evaluate(m).energy) / (2.0 * h);
  }
  return g;
}

double iat_from_covariances(std::span<const double> c) {
  double s = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) s += c[k];
  return 1.0 + 2.0 * s / c[0];
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double sample_sd(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace taumax::testing
