#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "taumax/covariance.hpp"
#include "taumax/window.hpp"

namespace taumax {

/// Largest eigenpair of the pencil (K, C0).
struct GevResult {
  double value = 0.0;
  /// Scaled so that aᵀ C0 a = 1.
  Eigen::VectorXd a;
  /// Smallest eigenvalue of C0 divided by its trace.
  double condition = 0.0;
};

/// Cholesky reduction C0 = LLᵀ and a symmetric eigensolve of L⁻¹ K L⁻ᵀ. K is
/// symmetrized first. Throws CollinearBasisError when C0 is not positive
/// definite, DimensionError on shape mismatch.
GevResult generalized_eig_max(const Eigen::MatrixXd& k, const Eigen::MatrixXd& c0);

/// Smallest eigenvalue of c0 over its trace.
double condition_diagnostic(const Eigen::MatrixXd& c0);

/// Indices of rows kept by pivoted elimination on the correlation matrix of
/// c0: a row is dropped when the fraction of its variance not explained by
/// the rows kept before it is below `threshold`. Earlier rows win ties.
std::vector<std::size_t> independent_rows(const Eigen::MatrixXd& c0, double threshold = 1e-10);

enum class WindowKind { optimal, acor };

std::string_view to_string(WindowKind kind);
/// Accepts "new"/"optimal" and "acor". Throws ConfigError otherwise.
WindowKind parse_window_kind(std::string_view name);

struct ThoroughnessReport {
  double tol = 0.1;
  double n_required = 0.0;
  bool satisfied = false;
};

/// n_required = τ_max / tol², satisfied iff N >= n_required.
/// Throws ConfigError unless 0 < tol <= 1.
ThoroughnessReport check_thoroughness(std::size_t n, double tau_max, double tol);

/// (1 + λ) / (1 - λ). Throws ConfigError unless 0 <= λ < 1.
double tau_from_ar1(double lambda);

struct TauMaxOptions {
  WindowKind window = WindowKind::optimal;
  /// Ignored by the acor window.
  std::size_t doubling_levels = 1;
  std::size_t max_lags = 0;
  double rtol = 1e-3;
  std::size_t max_iters = 20;
  bool monotone_guard = true;
  /// Drop collinear rows instead of failing.
  bool prune_collinear = true;
  bool symmetrize = true;
  double tol = 0.1;
};

struct TauMaxIteration {
  double tau = 0.0;
  Eigen::VectorXd a;  ///< over the kept rows, aᵀC0a = 1
  double window_m = 0.0;
  std::size_t window_lags = 0;
  TauStatus status = TauStatus::ok;
};

enum class StopReason { converged, max_iters };

struct TauMaxResult {
  double tau_max = 0.0;
  double ess = 0.0;
  std::size_t n_samples = 0;
  /// One entry per input row, largest magnitude scaled to +1, dropped rows 0.
  Eigen::VectorXd coefficients;
  std::vector<TauMaxIteration> trace;
  std::size_t iterations = 0;
  StopReason stop = StopReason::max_iters;
  TauStatus status = TauStatus::ok;
  ThoroughnessReport thoroughness;
  /// τ of each input row with the same window machinery (NaN for dropped rows).
  std::vector<double> individual_tau;
  std::vector<std::size_t> kept_rows;
  std::vector<std::size_t> dropped_rows;
};

/// Iterates window selection on aᵀu, assembly of K with that window, and the
/// generalized eigensolve, starting from the row with the largest τ.
/// Throws CollinearBasisError when rows are dependent and pruning is off (or
/// C0 stays singular), DimensionError when N < 16.
TauMaxResult estimate_tau_max(const ObservableSeries& series, const TauMaxOptions& options = {});

}  // namespace taumax
