#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "taumax/samplers.hpp"

namespace taumax {

/// d × N matrix of observable values along a chain, each row centred on its
/// own sample mean.
class ObservableSeries {
 public:
  /// Centres every row of `raw` (d × N). Labels default to u1..ud.
  /// Throws DimensionError if N < 2 or d < 1.
  explicit ObservableSeries(RowMatrix raw, std::vector<std::string> labels = {});

  std::size_t dimension() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t length() const { return static_cast<std::size_t>(values_.cols()); }

  const RowMatrix& values() const { return values_; }
  const Eigen::VectorXd& means() const { return means_; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.row(static_cast<Eigen::Index>(i)).data(), length()};
  }

  /// The first n samples, re-centred on their own means.
  ObservableSeries prefix(std::size_t n) const;
  /// Keeps only the listed rows.
  ObservableSeries select(std::span<const std::size_t> rows) const;

 private:
  RowMatrix values_;
  Eigen::VectorXd means_;
  std::vector<std::string> labels_;
};

/// Autocovariances C_N(0..K-1) of a scalar series.
struct CovSeq {
  std::size_t n_samples = 0;
  std::vector<double> values;

  std::size_t lags() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
};

/// Cross-covariance matrices C_0..C_{K-1} of a vector series; entry (i, j) of
/// C_k estimates E[u_i(Q_0) u_j(Q_k)].
struct CrossCovSeq {
  std::size_t n_samples = 0;
  std::vector<Eigen::MatrixXd> values;

  std::size_t lags() const { return values.size(); }
  const Eigen::MatrixXd& operator[](std::size_t k) const { return values[k]; }
};

/// C_N(k) = (1/N) Σ_{n<N-k} (x_n - x̄)(x_{n+k} - x̄) for k < lags, by FFT with
/// zero padding to the next power of two >= 2N. Divisor N at every lag.
/// Throws ConfigError if lags > N or lags == 0, DegenerateSeriesError if the
/// series is constant.
CovSeq autocovariance(std::span<const double> series, std::size_t lags);

/// Lag-k cross-covariances of the (already centred) rows, same estimator and
/// padding as autocovariance(). With `symmetrize`, each C_k is replaced by
/// (C_k + C_kᵀ)/2.
CrossCovSeq cross_covariance_matrices(const ObservableSeries& series, std::size_t lags, bool symmetrize = true);

/// Pairwise sums v_i = u_{2i} + u_{2i+1} of the centred series, i < ⌊N/2⌋.
struct DoublingResult {
  std::vector<double> series;
  /// C_v(0) / C_u(0); then τ_u = ½ · variance_ratio · τ_v.
  double variance_ratio = 0.0;
};

/// Throws DimensionError if N < 4 and DegenerateSeriesError for a constant series.
DoublingResult doubling_transform(std::span<const double> series);

/// Row-wise doubling of a centred d × N matrix (result d × ⌊N/2⌋, re-centred).
RowMatrix doubling_transform_rows(const RowMatrix& centred);

/// Exact covariances of the doubled process from those of the original:
/// C_v(k) = 2C(2k) + C(2k-1) + C(2k+1), with C(-1) = C(1).
/// Needs 2K+1 input lags for K output lags; returns ⌊(size-1)/2⌋ lags.
std::vector<double> doubled_covariances(std::span<const double> covariances);

/// True when C(0) is zero relative to the magnitude of the raw values.
bool is_degenerate_variance(double c0, double scale);

}  // namespace taumax
