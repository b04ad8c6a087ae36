#include "taumax/tau_max.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "taumax/errors.hpp"
#include "window_select.hpp"

namespace taumax {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Window choice for one iteration: weights over lags 0..weights.size()-1 plus
// the model tail, as a multiple of C0.
struct IterationWindow {
  std::vector<double> weights;
  double tail = 0.0;
  double m = 0.0;
  TauStatus status = TauStatus::ok;
};

std::vector<double> normalized_acf(const CrossCovSeq& cov, const VectorXd& a, std::size_t lags) {
  std::vector<double> acf(lags);
  const double c0 = a.dot(cov[0] * a);
  for (std::size_t k = 0; k < lags; ++k) acf[k] = a.dot(cov[k] * a) / c0;
  return acf;
}

// (1/N) Σ_n u(n) u(n)ᵀ of the centred rows; the lag-0 term of the FFT path
// without the transforms.
MatrixXd lag0_covariance(const ObservableSeries& series) {
  const auto& v = series.values();
  MatrixXd c0 = v * v.transpose();
  return c0 / static_cast<double>(series.length());
}

}  // namespace

double condition_diagnostic(const MatrixXd& c0) {
  const double trace = c0.trace();
  if (c0.rows() == 0 || !(trace > 0.0)) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(c0, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) / trace;
}

GevResult generalized_eig_max(const MatrixXd& k, const MatrixXd& c0) {
  if (c0.rows() == 0 || c0.rows() != c0.cols() || k.rows() != c0.rows() || k.cols() != c0.cols()) {
    throw DimensionError("K and C0 must be square matrices of the same size");
  }
  const MatrixXd c0s = 0.5 * (c0 + c0.transpose());
  const MatrixXd ks = 0.5 * (k + k.transpose());
  Eigen::LLT<MatrixXd> llt(c0s);
  if (llt.info() != Eigen::Success) {
    const double cond = condition_diagnostic(c0s);
    throw CollinearBasisError("C0 is not positive definite (condition " + std::to_string(cond) + ")", cond);
  }
  const MatrixXd lower = llt.matrixL();
  const auto l = lower.triangularView<Eigen::Lower>();
  const MatrixXd x = l.solve(ks);                  // L⁻¹K
  MatrixXd reduced = l.solve(x.transpose());       // L⁻¹KL⁻ᵀ
  reduced = 0.5 * (reduced + reduced.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(reduced);
  if (es.info() != Eigen::Success) throw Error("symmetric eigensolve failed");
  const Eigen::Index top = reduced.rows() - 1;

  GevResult out;
  out.value = es.eigenvalues()(top);
  out.a = lower.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors().col(top));
  out.a /= std::sqrt(out.a.dot(c0s * out.a));
  out.condition = condition_diagnostic(c0s);
  return out;
}

std::vector<std::size_t> independent_rows(const MatrixXd& c0, double threshold) {
  const Eigen::Index d = c0.rows();
  std::vector<std::size_t> kept;
  VectorXd inv_sd(d);
  for (Eigen::Index i = 0; i < d; ++i) inv_sd(i) = c0(i, i) > 0.0 ? 1.0 / std::sqrt(c0(i, i)) : 0.0;
  const MatrixXd corr = inv_sd.asDiagonal() * c0 * inv_sd.asDiagonal();

  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(c0(i, i) > 0.0)) continue;
    double residual = 1.0;
    if (!kept.empty()) {
      const auto nk = static_cast<Eigen::Index>(kept.size());
      MatrixXd rkk(nk, nk);
      VectorXd rki(nk);
      for (Eigen::Index r = 0; r < nk; ++r) {
        rki(r) = corr(static_cast<Eigen::Index>(kept[r]), i);
        for (Eigen::Index c = 0; c < nk; ++c) {
          rkk(r, c) = corr(static_cast<Eigen::Index>(kept[r]), static_cast<Eigen::Index>(kept[c]));
        }
      }
      residual = 1.0 - rki.dot(rkk.ldlt().solve(rki));
    }
    if (residual >= threshold) kept.push_back(static_cast<std::size_t>(i));
  }
  return kept;
}

std::string_view to_string(WindowKind kind) { return kind == WindowKind::acor ? "acor" : "new"; }

WindowKind parse_window_kind(std::string_view name) {
  if (name == "new" || name == "optimal") return WindowKind::optimal;
  if (name == "acor") return WindowKind::acor;
  throw ConfigError("unknown window '" + std::string(name) + "' (expected new or acor)");
}

ThoroughnessReport check_thoroughness(std::size_t n, double tau_max, double tol) {
  if (!(tol > 0.0 && tol <= 1.0)) throw ConfigError("tol must lie in (0, 1]");
  ThoroughnessReport r;
  r.tol = tol;
  r.n_required = tau_max / (tol * tol);
  r.satisfied = static_cast<double>(n) >= r.n_required;
  return r;
}

double tau_from_ar1(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw ConfigError("AR(1) coefficient must lie in [0, 1)");
  return (1.0 + lambda) / (1.0 - lambda);
}

TauMaxResult estimate_tau_max(const ObservableSeries& series, const TauMaxOptions& options) {
  const std::size_t n = series.length();
  const std::size_t d = series.dimension();
  if (n < 16) throw DimensionError("estimating τ_max needs at least 16 samples");
  if (options.max_iters == 0) throw ConfigError("max_iters must be positive");
  if (!(options.rtol >= 0.0)) throw ConfigError("rtol must be nonnegative");
  const bool acor = options.window == WindowKind::acor;

  TauMaxResult result;
  result.n_samples = n;

  // Collinearity check on the original-level lag-0 covariance.
  const MatrixXd c0_all = lag0_covariance(series);
  result.kept_rows = independent_rows(c0_all);
  for (std::size_t i = 0; i < d; ++i) {
    if (std::find(result.kept_rows.begin(), result.kept_rows.end(), i) == result.kept_rows.end()) {
      result.dropped_rows.push_back(i);
    }
  }
  if (!result.dropped_rows.empty() && (!options.prune_collinear || result.kept_rows.empty())) {
    std::string names;
    for (std::size_t i : result.dropped_rows) names += (names.empty() ? "" : ", ") + series.labels()[i];
    const double cond = condition_diagnostic(c0_all);
    throw CollinearBasisError("observables are linearly dependent on earlier ones: " + names, cond);
  }
  const ObservableSeries basis = result.dropped_rows.empty() ? series : series.select(result.kept_rows);
  const std::size_t dk = basis.dimension();

  // Individual τ with the same machinery.
  TauOptions scalar_opts;
  scalar_opts.doubling_levels = options.doubling_levels;
  scalar_opts.max_lags = options.max_lags;
  result.individual_tau.assign(d, std::numeric_limits<double>::quiet_NaN());
  std::vector<TauEstimate> individual;
  for (std::size_t i = 0; i < dk; ++i) {
    individual.push_back(acor ? estimate_tau_acor(basis.row(i)) : estimate_tau(basis.row(i), scalar_opts));
    result.individual_tau[result.kept_rows[i]] = individual.back().tau;
  }

  // Doubled top-level series and its cross-covariances.
  std::size_t levels = 0;
  RowMatrix top = basis.values();
  if (!acor) {
    while (levels < options.doubling_levels && static_cast<std::size_t>(top.cols()) / 2 >= 8) {
      top = doubling_transform_rows(ObservableSeries(top).values());
      ++levels;
    }
  }
  const ObservableSeries top_series(top);
  const std::size_t n_eff = top_series.length();
  std::size_t lags = options.max_lags ? std::min(options.max_lags, n_eff) : default_max_lags(n_eff);
  if (acor) {
    double worst = 1.0;
    for (const auto& est : individual) worst = std::max(worst, est.tau);
    lags = std::min(n_eff, std::max<std::size_t>(lags, static_cast<std::size_t>(20.0 * worst) + 2));
  }
  if (lags < 3) throw ConfigError("at least three lags are needed for the window fit");
  CrossCovSeq cov = cross_covariance_matrices(top_series, lags, options.symmetrize);

  MatrixXd c0_u = lag0_covariance(basis);
  {
    Eigen::LLT<MatrixXd> llt(c0_u);
    if (llt.info() != Eigen::Success) c0_u += MatrixXd::Identity(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk)) *
                                               (1e-12 * c0_u.trace() / static_cast<double>(dk));
  }
  const double level_scale = std::ldexp(1.0, -static_cast<int>(levels));

  auto choose_window = [&](const VectorXd& a) {
    IterationWindow w;
    if (acor) {
      for (;;) {
        const std::vector<double> acf = normalized_acf(cov, a, cov.lags());
        const detail::AcorWindow aw = detail::acor_window(acf);
        if (aw.lags < cov.lags() || cov.lags() == n_eff) {
          w.weights.assign(aw.lags, 1.0);
          w.m = static_cast<double>(aw.lags - 1);
          w.status = !aw.converged || static_cast<double>(n) < 100.0 * aw.tau ? TauStatus::insufficient_samples
                                                                                : TauStatus::ok;
          return w;
        }
        cov = cross_covariance_matrices(top_series, std::min(n_eff, 2 * cov.lags()), options.symmetrize);
      }
    }
    const std::vector<double> acf = normalized_acf(cov, a, lags);
    const detail::WindowSelection sel = detail::select_window(acf);
    w.weights = sel.window.weights;
    w.tail = sel.tail;
    w.m = sel.window.m;
    w.status = sel.status;
    return w;
  };

  // Start from the row with the largest individual τ.
  std::size_t start = 0;
  for (std::size_t i = 1; i < dk; ++i) {
    if (individual[i].tau > individual[start].tau) start = i;
  }
  VectorXd a = VectorXd::Zero(static_cast<Eigen::Index>(dk));
  a(static_cast<Eigen::Index>(start)) = 1.0 / std::sqrt(c0_u(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(start)));

  double best_tau = individual[start].tau;
  VectorXd best_a = a;
  TauStatus best_status = individual[start].status;
  double previous = best_tau;
  bool any_usable = best_status != TauStatus::degenerate;

  for (std::size_t it = 0; it < options.max_iters; ++it) {
    const IterationWindow w = choose_window(a);
    MatrixXd k_v = cov[0] * (1.0 + w.tail);
    for (std::size_t k = 1; k < w.weights.size(); ++k) {
      if (w.weights[k] != 0.0) k_v += 2.0 * w.weights[k] * cov[k];
    }
    const GevResult gev = generalized_eig_max(k_v * level_scale, c0_u);
    const double tau = gev.value;
    if (w.status != TauStatus::degenerate) any_usable = true;

    if (!options.monotone_guard || tau > best_tau) {
      best_tau = tau;
      best_a = gev.a;
      best_status = w.status;
    }
    TauMaxIteration step;
    step.tau = options.monotone_guard ? best_tau : tau;
    step.a = gev.a;
    step.window_m = w.m;
    step.window_lags = w.weights.size();
    step.status = w.status;
    result.trace.push_back(std::move(step));
    result.iterations = it + 1;

    const bool converged = std::abs(tau - previous) <= options.rtol * std::abs(tau);
    previous = tau;
    a = gev.a;
    if (converged) {
      result.stop = StopReason::converged;
      break;
    }
  }

  result.tau_max = std::max(best_tau, 0.0);
  result.status = any_usable ? best_status : TauStatus::degenerate;
  if (result.tau_max == 0.0) result.status = TauStatus::degenerate;
  result.ess = result.tau_max > 0.0 ? static_cast<double>(n) / result.tau_max : std::numeric_limits<double>::infinity();

  result.coefficients = VectorXd::Zero(static_cast<Eigen::Index>(d));
  Eigen::Index arg = 0;
  best_a.cwiseAbs().maxCoeff(&arg);
  const double pivot = best_a(arg);
  for (std::size_t i = 0; i < dk; ++i) {
    result.coefficients(static_cast<Eigen::Index>(result.kept_rows[i])) = best_a(static_cast<Eigen::Index>(i)) / pivot;
  }
  result.thoroughness = check_thoroughness(n, result.tau_max, options.tol);
  return result;
}

}  // namespace taumax
