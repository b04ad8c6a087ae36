#include "taumax/window.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "taumax/errors.hpp"
#include "window_select.hpp"

namespace taumax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// f(λ) = -Q²/P + Σc² and its derivative, with P = Σλ^{2k}, Q = Σ c_k λ^k.
struct Objective {
  std::span<const double> c;
  double sum_sq = 0.0;

  explicit Objective(std::span<const double> acf) : c(acf) {
    for (double v : c) sum_sq += v * v;
  }

  struct Terms {
    double p, q, dp, dq;
  };

  Terms terms(double lambda) const {
    Terms t{0.0, 0.0, 0.0, 0.0};
    double pk = 1.0;        // λ^k
    double pk_prev = 0.0;   // λ^{k-1}
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double kd = static_cast<double>(k);
      t.p += pk * pk;
      t.q += c[k] * pk;
      if (k > 0) {
        t.dp += 2.0 * kd * pk * pk_prev;
        t.dq += kd * c[k] * pk_prev;
      }
      pk_prev = pk;
      pk *= lambda;
    }
    return t;
  }

  double value(double lambda) const {
    const Terms t = terms(lambda);
    return -t.q * t.q / t.p + sum_sq;
  }

  double derivative(double lambda) const {
    const Terms t = terms(lambda);
    return -t.q * (2.0 * t.dq * t.p - t.q * t.dp) / (t.p * t.p);
  }
};

double golden_section(const Objective& f, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f.value(x1), f2 = f.value(x2);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f.value(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f.value(x2);
    }
  }
  return 0.5 * (a + b);
}

double minimize_in(const Objective& f, double a, double b) {
  double fa = f.derivative(a), fb = f.derivative(b);
  if (!(fa < 0.0 && fb > 0.0)) return golden_section(f, a, b);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = f.derivative(mid);
    if (fm == 0.0) return mid;
    (fm < 0.0 ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

std::vector<double> search_grid() {
  std::vector<double> grid;
  constexpr int kSteps = 200;
  for (int i = 0; i <= kSteps; ++i) grid.push_back(static_cast<double>(i) / kSteps);
  // Extra resolution next to 1 where slowly decaying ACFs live.
  for (int j = 3; j <= 9; ++j) grid.push_back(1.0 - std::pow(10.0, -j));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

// Fit without the error policy of the public entry point.
AcfFit fit_impl(std::span<const double> c) {
  static const std::vector<double> grid = search_grid();
  const Objective f(c);

  std::size_t best = 0;
  double best_value = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f.value(grid[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }

  AcfFit fit;
  fit.lags = c.size();
  const std::size_t last = grid.size() - 1;
  double lambda;
  if (best == 0 && !(f.derivative(grid[1] * 1e-6) < 0.0)) {
    lambda = 0.0;
    fit.boundary = FitBoundary::lower;
  } else if (best == last && !(f.derivative(1.0 - 1e-12) > 0.0)) {
    lambda = 1.0;
    fit.boundary = FitBoundary::upper;
  } else {
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, last)];
    lambda = minimize_in(f, lo, hi);
    if (lambda >= 1.0) {
      lambda = 1.0;
      fit.boundary = FitBoundary::upper;
    } else if (lambda <= 0.0) {
      lambda = 0.0;
      fit.boundary = FitBoundary::lower;
    }
  }

  const auto t = f.terms(lambda);
  fit.lambda = lambda;
  fit.c0 = t.q / t.p;
  double ss = 0.0, pk = 1.0;
  for (double ck : c) {
    const double r = fit.c0 * pk - ck;
    ss += r * r;
    pk *= lambda;
  }
  fit.sigma = std::sqrt(ss / static_cast<double>(c.size())) / c[0];
  return fit;
}

struct TauCore {
  TauEstimate estimate;
  double recovery = 1.0;  // τ_u / τ_v accumulated over the doubling levels
};

TauEstimate degenerate_estimate(std::size_t n) {
  TauEstimate est;
  est.tau = 1.0;
  est.ess = static_cast<double>(n);
  est.n_samples = n;
  est.status = TauStatus::degenerate;
  return est;
}

void finish(TauEstimate& est) {
  if (!(est.tau > 0.0)) {
    est.tau = 0.0;
    est.status = TauStatus::degenerate;
    est.ess = kInf;
  } else {
    est.ess = static_cast<double>(est.n_samples) / est.tau;
  }
}

TauCore estimate_tau_core(std::span<const double> series, const TauOptions& options) {
  const std::size_t n = series.size();
  if (n < 16) throw DimensionError("estimating τ needs at least 16 samples");

  TauCore core;
  std::vector<double> current(series.begin(), series.end());
  std::size_t levels = 0;
  for (; levels < options.doubling_levels && current.size() / 2 >= 8; ++levels) {
    const DoublingResult d = doubling_transform(current);
    core.recovery *= 0.5 * d.variance_ratio;
    current = d.series;
  }

  const std::size_t n_eff = current.size();
  const std::size_t lags = options.max_lags ? std::min(options.max_lags, n_eff) : default_max_lags(n_eff);
  if (lags < 3) throw ConfigError("at least three lags are needed for the window fit");

  const CovSeq cov = autocovariance(current, lags);
  std::vector<double> acf(lags);
  for (std::size_t k = 0; k < lags; ++k) acf[k] = cov[k] / cov[0];

  const detail::WindowSelection sel = detail::select_window(acf);
  TauEstimate& est = core.estimate;
  est.n_samples = n;
  est.doubling_levels = levels;
  est.fit = sel.fit;
  est.window = sel.window;
  est.status = sel.status;
  est.tau = core.recovery * sel.tau(acf);
  est.acf = std::move(acf);
  finish(est);
  return core;
}

}  // namespace

std::string_view to_string(TauStatus status) {
  switch (status) {
    case TauStatus::ok:
      return "ok";
    case TauStatus::insufficient_samples:
      return "insufficient_samples";
    case TauStatus::degenerate:
      return "degenerate";
  }
  return "unknown";
}

std::size_t default_max_lags(std::size_t n) {
  const std::size_t tenth = (n + 9) / 10;
  return std::min(n, std::clamp<std::size_t>(tenth, 20, 2000));
}

namespace detail {

std::vector<double> window_weights(double lambda, double m, std::size_t lags) {
  std::vector<double> w(lags, 1.0);
  for (std::size_t k = 0; k < lags; ++k) {
    const double kd = static_cast<double>(k);
    if (kd > m) w[k] = std::pow(lambda, kd - m);
  }
  return w;
}

double model_tail_sum(double lambda, double m, std::size_t lags) {
  if (lambda <= 0.0) return 0.0;
  const double md = static_cast<double>(lags);
  if (!(m < 1e15)) return std::pow(lambda, md) / (1.0 - lambda);
  const double k1 = std::max(md, std::floor(m) + 1.0);
  const double flat = (std::pow(lambda, md) - std::pow(lambda, k1)) / (1.0 - lambda);
  const double decayed = std::pow(lambda, 2.0 * k1 - m) / (1.0 - lambda * lambda);
  return flat + decayed;
}

AcorWindow acor_window(std::span<const double> acf) {
  // prefix[k] = Σ_{j=1}^{k} ρ(j)
  std::vector<double> prefix(acf.size(), 0.0);
  for (std::size_t k = 1; k < acf.size(); ++k) prefix[k] = prefix[k - 1] + acf[k];
  const double cap = static_cast<double>(acf.size());
  auto width_for = [cap](double tau) {
    return static_cast<std::size_t>(std::min(std::floor(10.0 * std::max(tau, 0.0)) + 1.0, cap));
  };

  AcorWindow out;
  out.lags = width_for(1.0);
  out.converged = false;
  for (int it = 0; it < 100; ++it) {
    out.tau = 1.0 + 2.0 * prefix[out.lags - 1];
    const std::size_t next = width_for(out.tau);
    if (next == out.lags) {
      out.converged = true;
      break;
    }
    out.lags = next;
  }
  out.tau = 1.0 + 2.0 * prefix[out.lags - 1];
  return out;
}

double WindowSelection::tau(std::span<const double> acf) const {
  double sum = 0.0;
  for (std::size_t k = 1; k < window.weights.size(); ++k) sum += window.weights[k] * acf[k];
  return 1.0 + 2.0 * sum + tail;
}

WindowSelection select_window(std::span<const double> acf) {
  const std::size_t lags = acf.size();
  WindowSelection sel;
  sel.fit = fit_impl(acf);

  auto single_lag = [&] {
    sel.window.m = 0.0;
    sel.window.mu = 0.0;
    sel.window.weights.assign(lags, 0.0);
    sel.window.weights[0] = 1.0;
  };

  if (!(sel.fit.c0 > 0.0) || !std::isfinite(sel.fit.c0)) {
    single_lag();
    sel.status = TauStatus::degenerate;
    return sel;
  }
  switch (sel.fit.boundary) {
    case FitBoundary::lower:
      // No positive correlation to model: treat as white noise.
      single_lag();
      return sel;
    case FitBoundary::upper:
      // No decay within the fitted lags.
      sel.window.m = static_cast<double>(lags);
      sel.window.mu = 1.0;
      sel.window.weights.assign(lags, 1.0);
      sel.status = TauStatus::insufficient_samples;
      return sel;
    case FitBoundary::interior:
      break;
  }

  const WindowOffset off = optimal_window_offset(sel.fit);
  sel.status = off.status;
  // μ > 1 would put the window below 1 at lag 0; keep w(0) = 1.
  const double m = std::max(off.m, 0.0);
  sel.window.m = m;
  sel.window.mu = off.mu;
  sel.window.weights = window_weights(sel.fit.lambda, m, lags);
  sel.tail = 2.0 * sel.fit.c0 * model_tail_sum(sel.fit.lambda, m, lags);
  return sel;
}

}  // namespace detail

AcfFit fit_exponential_acf(const CovSeq& cov, std::size_t lags) {
  if (lags < 3) throw ConfigError("the exponential fit needs at least three lags");
  if (cov.lags() < lags) throw ConfigError("covariance sequence is shorter than the requested lags");
  if (!(cov[0] > 0.0)) throw DegenerateSeriesError("C(0) must be positive");
  const AcfFit fit = fit_impl(std::span<const double>(cov.values.data(), lags));
  if (!(fit.c0 > 0.0)) throw DegenerateSeriesError("fitted c0 is not positive; the ACF does not decay exponentially");
  if (fit.boundary != FitBoundary::interior) {
    throw DegenerateSeriesError("no interior minimum for λ in (0, 1)");
  }
  return fit;
}

WindowOffset optimal_window_offset(const AcfFit& fit) {
  const double lambda = fit.lambda, c0 = fit.c0, sigma = fit.sigma;
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("λ must lie in (0, 1)");
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw ConfigError("c0 must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("σ must be nonnegative");

  WindowOffset out;
  if (sigma == 0.0) {
    out.mu = 0.0;
    out.m = kInf;
    return out;
  }
  const double s2 = sigma * sigma;
  const double one_minus = 1.0 - lambda * lambda;
  const double a_coef = 4.0 * c0 * lambda * lambda / (one_minus * one_minus);
  const double b_coef = 4.0 * s2 / std::log(lambda);  // negative
  // 2A(1+σ²)μ² - 2Aσ²(1+λ)μ + B = 0
  const double qa = 2.0 * a_coef * (1.0 + s2);
  const double qb = 2.0 * a_coef * s2 * (1.0 + lambda);
  const double disc = qb * qb - 4.0 * qa * b_coef;
  out.mu = (qb + std::sqrt(disc)) / (2.0 * qa);
  out.m = std::log(out.mu) / std::log(lambda);
  out.status = out.mu > 1.0 ? TauStatus::insufficient_samples : TauStatus::ok;
  return out;
}

TauEstimate estimate_tau(std::span<const double> series, const TauOptions& options) {
  try {
    return estimate_tau_core(series, options).estimate;
  } catch (const DegenerateSeriesError&) {
    return degenerate_estimate(series.size());
  }
}

TauEstimate estimate_tau_acor(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 16) throw DimensionError("estimating τ needs at least 16 samples");
  CovSeq cov;
  try {
    cov = autocovariance(series, n);
  } catch (const DegenerateSeriesError&) {
    return degenerate_estimate(n);
  }

  std::vector<double> acf(n);
  for (std::size_t k = 0; k < n; ++k) acf[k] = cov[k] / cov[0];
  const detail::AcorWindow aw = detail::acor_window(acf);
  const std::size_t lags = aw.lags;
  const double tau = aw.tau;

  TauEstimate est;
  est.n_samples = n;
  est.tau = tau;
  est.fit.lags = lags;
  est.window.m = static_cast<double>(lags - 1);
  est.window.mu = 1.0;
  est.window.weights.assign(lags, 1.0);
  acf.resize(lags);
  est.acf = std::move(acf);
  est.status = static_cast<double>(n) < 100.0 * tau ? TauStatus::insufficient_samples : TauStatus::ok;
  finish(est);
  // A window that never settled says more than a floored τ does.
  if (!aw.converged) est.status = TauStatus::insufficient_samples;
  return est;
}

double variance_of_mean(std::span<const double> series, const TauOptions& options) {
  const std::size_t n = series.size();
  const TauCore core = estimate_tau_core(series, options);
  const TauEstimate& est = core.estimate;

  // Translate the window from doubled lags back to original lags.
  const double scale = std::ldexp(1.0, static_cast<int>(est.doubling_levels));
  const double lambda = est.fit.lambda > 0.0 ? std::pow(est.fit.lambda, 1.0 / scale) : 0.0;
  const double m = est.window.m * scale;
  const std::size_t lags = std::min(n, static_cast<std::size_t>(static_cast<double>(est.window.weights.size()) * scale));

  const CovSeq cov = autocovariance(series, lags);
  const double nd = static_cast<double>(n);
  double sum = 0.0;
  if (est.fit.boundary != FitBoundary::lower) {
    const std::vector<double> w = est.fit.boundary == FitBoundary::upper
                                      ? std::vector<double>(lags, 1.0)
                                      : detail::window_weights(lambda, m, lags);
    for (std::size_t k = 1; k < lags; ++k) {
      sum += w[k] * (1.0 - static_cast<double>(k) / nd) * cov[k] / cov[0];
    }
    if (est.fit.boundary == FitBoundary::interior && est.status != TauStatus::degenerate) {
      const double c0 = est.fit.c0 * core.recovery / scale;
      sum += c0 * detail::model_tail_sum(lambda, m, lags);
    }
  }
  return cov[0] / nd * std::max(0.0, 1.0 + 2.0 * sum);
}

}  // namespace taumax
