#pragma once

// Independent reference implementations used only by tests.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "taumax/targets.hpp"

namespace taumax::testing {

/// C(k) = (1/N) Σ (x_n - x̄)(x_{n+k} - x̄) by direct summation, long double accumulators.
std::vector<double> direct_autocovariance(std::span<const double> x, std::size_t lags);

/// Direct cross-covariance E[u_i(n) u_j(n+k)] of the rows of `x` (d × N), centred per row.
Eigen::MatrixXd direct_cross_covariance(const Eigen::MatrixXd& x, std::size_t k);

/// x_{n+1} = λ x_n + √(1-λ²) ξ_n started in stationarity, unit variance.
std::vector<double> ar1_series(double lambda, std::size_t n, std::uint64_t seed);

/// Exact AR(1) covariances c0 λ^k for k < lags.
std::vector<double> ar1_covariances(double lambda, double c0, std::size_t lags);

/// Largest generalized eigenvalue of (K, C0) from Eigen's QZ-based dense solver.
double dense_gev_max(const Eigen::MatrixXd& k, const Eigen::MatrixXd& c0);

/// Maximum of aᵀKa / aᵀC0a over `samples` random unit vectors.
double sampled_rayleigh_max(const Eigen::MatrixXd& k, const Eigen::MatrixXd& c0, std::size_t samples,
                            std::uint64_t seed);

/// Random symmetric positive-definite d × d matrix.
Eigen::MatrixXd random_spd(std::size_t d, std::uint64_t seed);

/// The expected squared error of the windowed estimator as a function of μ
/// (the displayed expression, in long double).
long double window_error(long double mu, long double lambda, long double c0, long double sigma);

/// argmin of window_error over μ in (0, hi] by dense scan plus golden section.
double minimize_window_error(double lambda, double c0, double sigma, double hi = 1.0);

/// Central finite-difference gradient with step h.
Eigen::VectorXd finite_difference_gradient(const Target& target, const Eigen::VectorXd& q, double h);

/// Σ_k w(k) C(k) τ formula on exact covariances: 1 + 2 Σ_{k>=1} C(k)/C(0).
double iat_from_covariances(std::span<const double> c);

double median(std::vector<double> v);
double sample_sd(std::span<const double> v);

}  // namespace taumax::testing
