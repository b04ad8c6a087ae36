#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "taumax/covariance.hpp"

namespace taumax {

enum class TauStatus {
  ok,
  insufficient_samples,  ///< τ is advisory: the chain is too short for a reliable estimate
  degenerate,            ///< τ is advisory: no usable autocorrelation structure
};

std::string_view to_string(TauStatus status);

/// Where the fitted λ landed in [0, 1].
enum class FitBoundary { interior, lower, upper };

/// Exponential model C_N(k) ≈ c0 λ^k + σ c0 η_k fitted over lags 0..lags-1.
struct AcfFit {
  double lambda = 0.0;
  double c0 = 0.0;
  /// RMS of the residuals relative to C_N(0).
  double sigma = 0.0;
  std::size_t lags = 0;
  FitBoundary boundary = FitBoundary::interior;
};

/// w(k) = min{1, λ^(k-m)} for k = 0..weights.size()-1.
struct LagWindow {
  double m = 0.0;
  double mu = 0.0;
  std::vector<double> weights;
};

struct WindowOffset {
  double m = 0.0;
  double mu = 0.0;
  TauStatus status = TauStatus::ok;
};

struct TauOptions {
  /// Number of pairwise-sum halvings applied before the fit.
  std::size_t doubling_levels = 1;
  /// Lags of the (doubled) series fed to the fit; 0 picks default_max_lags().
  std::size_t max_lags = 0;
};

struct TauEstimate {
  double tau = 1.0;
  /// N / τ; infinite when τ was floored at zero.
  double ess = 0.0;
  std::size_t n_samples = 0;
  AcfFit fit;
  /// Window over the lags of the doubled series the fit was made on.
  LagWindow window;
  TauStatus status = TauStatus::ok;
  std::size_t doubling_levels = 0;
  /// Normalized ACF of the doubled series, same length as window.weights.
  std::vector<double> acf;
};

/// clamp(⌈n/10⌉, 20, 2000), never more than n.
std::size_t default_max_lags(std::size_t n);

/// Least-squares fit of c0 λ^k to cov[0..lags-1] with c0 profiled out; λ from
/// a grid scan of [0, 1] refined by bisection on the derivative (golden
/// section when the derivative does not change sign).
/// Throws ConfigError when lags < 3 or cov is shorter than lags,
/// DegenerateSeriesError when C(0) <= 0 or the fitted c0 <= 0.
AcfFit fit_exponential_acf(const CovSeq& cov, std::size_t lags);

/// Positive root μ of the stationarity condition of the expected squared error
/// of the windowed estimator, m = log μ / log λ. μ > 1 flags insufficient_samples.
/// Throws ConfigError unless 0 < λ < 1, c0 > 0 and σ >= 0.
WindowOffset optimal_window_offset(const AcfFit& fit);

/// Windowed IAT with the fitted exponential window and model tail.
/// Throws DimensionError if N < 16; a constant series gives status degenerate, τ = 1.
TauEstimate estimate_tau(std::span<const double> series, const TauOptions& options = {});

/// Rectangular window of width M, M the smallest integer above 10τ, iterated
/// to a fixed point. insufficient_samples when N < 100τ.
TauEstimate estimate_tau_acor(std::span<const double> series);

/// (1/N) C_N(0) (1 + 2 Σ w(k)(1 - k/N) C_N(k)/C_N(0)) with the fitted window
/// translated back to the original lags. Throws DegenerateSeriesError for a
/// constant series.
double variance_of_mean(std::span<const double> series, const TauOptions& options = {});

}  // namespace taumax
