#pragma once

#include <span>

#include "taumax/window.hpp"

namespace taumax::detail {

/// Window chosen for a normalized ACF (acf[0] = 1), shared by the scalar and
/// the vector estimators.
struct WindowSelection {
  AcfFit fit;
  LagWindow window;
  /// Closed-form model contribution 2 Σ_{k>=M} w(k) c0 λ^k.
  double tail = 0.0;
  TauStatus status = TauStatus::ok;

  /// 1 + 2 Σ_{k=1}^{M-1} w(k) acf(k) + tail
  double tau(std::span<const double> acf) const;
};

WindowSelection select_window(std::span<const double> acf);

/// Self-consistent rectangular window on a normalized ACF.
struct AcorWindow {
  std::size_t lags = 1;
  double tau = 1.0;
  /// False when M <- smallest integer > 10τ never reached a fixed point.
  bool converged = true;
};

/// Iterates M from the window of τ = 1, at most 100 times, with M capped at
/// acf.size().
AcorWindow acor_window(std::span<const double> acf);

/// Window weights w(k) = min{1, λ^(k-m)}, k < lags.
std::vector<double> window_weights(double lambda, double m, std::size_t lags);

/// Σ_{k>=lags} min{1, λ^(k-m)} λ^k, closed form.
double model_tail_sum(double lambda, double m, std::size_t lags);

}  // namespace taumax::detail
