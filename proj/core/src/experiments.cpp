#include "taumax/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include <Eigen/Eigenvalues>

#include "taumax/csv.hpp"
#include "taumax/datasets.hpp"
#include "taumax/errors.hpp"
#include "taumax/observables.hpp"
#include "taumax/targets.hpp"
#include "taumax/trajectory_io.hpp"

namespace taumax {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string run_prefix(std::size_t run) { return run == 0 ? "" : "run" + std::to_string(run) + "/"; }

// Everything one ensemble member contributes.
struct RunOutput {
  Trajectory trajectory;
  std::vector<TauRow> rows;
  std::vector<Eigen::VectorXd> coefficients;
  std::vector<TauMaxResult> results;
};

struct Analysis {
  const Target* target = nullptr;
  std::vector<Observable> basis;
  std::vector<Observable> extras;
};

void run_parallel(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

ChainConfig chain_for(const ExperimentConfig& config, std::size_t run) {
  ChainConfig chain = config.chain;
  chain.n_steps = chain.burn_in + config.n_samples * chain.stride;
  chain.chain_id = config.chain.chain_id + run;
  return chain;
}

std::vector<std::size_t> checkpoints_of(const ExperimentConfig& config) {
  std::vector<std::size_t> cps = config.checkpoints.empty() ? default_checkpoints(config.n_samples) : config.checkpoints;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  cps.erase(std::remove_if(cps.begin(), cps.end(), [&](std::size_t n) { return n < 16 || n > config.n_samples; }),
            cps.end());
  if (cps.empty()) throw ConfigError("no usable checkpoints (need 16 <= n <= n_samples)");
  return cps;
}

void add_tau_row(std::vector<TauRow>& rows, std::size_t n, std::string name, double tau, double ess, TauStatus status) {
  rows.push_back({n, std::move(name), tau, ess, status});
}

RunOutput analyse_run(const ExperimentConfig& config, const Analysis& analysis, const Eigen::VectorXd& initial,
                      const std::vector<std::size_t>& checkpoints, std::size_t run) {
  RunOutput out;
  out.trajectory = run_chain(*analysis.target, config.sampler, chain_for(config, run), initial);
  const ObservableSeries basis = evaluate_observables(out.trajectory.states, analysis.basis);
  std::optional<ObservableSeries> extras;
  if (!analysis.extras.empty()) extras = evaluate_observables(out.trajectory.states, analysis.extras);

  TauOptions scalar;
  scalar.doubling_levels = config.tau_options.doubling_levels;
  scalar.max_lags = config.tau_options.max_lags;
  const std::string prefix = run_prefix(run);

  for (std::size_t n : checkpoints) {
    const ObservableSeries sub = n == basis.length() ? basis : basis.prefix(n);
    try {
      TauMaxResult res = estimate_tau_max(sub, config.tau_options);
      for (std::size_t i = 0; i < sub.dimension(); ++i) {
        const double t = res.individual_tau[i];
        add_tau_row(out.rows, n, prefix + sub.labels()[i], t, static_cast<double>(n) / t, TauStatus::ok);
      }
      add_tau_row(out.rows, n, prefix + "tau_max", res.tau_max, res.ess, res.status);
      out.coefficients.push_back(res.coefficients);
      out.results.push_back(std::move(res));
    } catch (const Error&) {
      // A short prefix can be degenerate (e.g. a chain that has not moved yet).
      add_tau_row(out.rows, n, prefix + "tau_max", kNaN, kNaN, TauStatus::degenerate);
      out.coefficients.push_back(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(sub.dimension()), kNaN));
      out.results.emplace_back();
    }
    if (config.compare_acor) {
      TauMaxOptions acor = config.tau_options;
      acor.window = WindowKind::acor;
      try {
        const TauMaxResult res = estimate_tau_max(sub, acor);
        add_tau_row(out.rows, n, prefix + "tau_max[acor]", res.tau_max, res.ess, res.status);
      } catch (const Error&) {
        add_tau_row(out.rows, n, prefix + "tau_max[acor]", kNaN, kNaN, TauStatus::degenerate);
      }
    }
    if (extras) {
      for (std::size_t i = 0; i < extras->dimension(); ++i) {
        const auto row = extras->row(i).first(n);
        const TauEstimate est = estimate_tau(row, scalar);
        add_tau_row(out.rows, n, prefix + extras->labels()[i], est.tau, est.ess, est.status);
      }
    }
  }
  // Individual statuses come from estimate_tau on each row.
  for (auto& row : out.rows) {
    if (row.observable.find("tau_max") != std::string::npos) continue;
    if (!std::isfinite(row.tau)) row.status = TauStatus::degenerate;
  }
  return out;
}

ExperimentReport assemble(const ExperimentConfig& config, const Analysis& analysis, const Eigen::VectorXd& initial,
                          Trajectory& first) {
  if (config.n_samples < 16) throw ConfigError("n_samples must be at least 16");
  if (config.ensemble == 0) throw ConfigError("ensemble size must be positive");
  config.chain.validate(config.sampler);

  ExperimentReport report;
  report.id = config.id;
  report.checkpoints = checkpoints_of(config);
  for (const auto& o : analysis.basis) report.observables.push_back(o.name);
  for (const auto& o : analysis.extras) report.observables.push_back(o.name);

  std::vector<RunOutput> runs(config.ensemble);
  run_parallel(config.ensemble, config.threads,
               [&](std::size_t r) { runs[r] = analyse_run(config, analysis, initial, report.checkpoints, r); });

  for (auto& run : runs) {
    for (auto& row : run.rows) report.tau_rows.push_back(std::move(row));
  }
  if (config.ensemble > 1) {
    for (std::size_t n : report.checkpoints) {
      std::vector<double> v = report.ensemble_tau_max(n);
      std::erase_if(v, [](double x) { return !std::isfinite(x); });
      if (v.empty()) continue;
      std::sort(v.begin(), v.end());
      const double median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
      report.tau_rows.push_back({n, "median/tau_max", median, static_cast<double>(n) / median, TauStatus::ok});
    }
  }
  report.coefficients = runs[0].coefficients;
  report.acceptance_rate = runs[0].trajectory.acceptance_rate;
  first = std::move(runs[0].trajectory);
  return report;
}

// --- CSV emission --------------------------------------------------------------

void emit(ExperimentReport& report, const ExperimentConfig& config, const std::string& name, const CsvWriter& csv) {
  if (config.out_dir.empty()) return;
  const auto path = config.out_dir / name;
  csv.write(path);
  report.manifest.push_back(path);
}

void emit_tau_and_coeffs(ExperimentReport& report, const ExperimentConfig& config, std::size_t d) {
  CsvWriter tau({"n", "observable", "tau", "ess", "status"});
  for (const auto& r : report.tau_rows) {
    const std::string cells[5] = {std::to_string(r.n), r.observable, format_double(r.tau), format_double(r.ess),
                                  std::string(to_string(r.status))};
    tau.add_row(std::span<const std::string>(cells, 5));
  }
  emit(report, config, "tau_vs_n.csv", tau);

  std::vector<std::string> header{"n"};
  for (std::size_t i = 0; i < d; ++i) header.push_back("a_" + std::to_string(i + 1));
  CsvWriter coeffs(header);
  for (std::size_t c = 0; c < report.checkpoints.size(); ++c) {
    std::vector<double> row{static_cast<double>(report.checkpoints[c])};
    for (Eigen::Index i = 0; i < report.coefficients[c].size(); ++i) row.push_back(report.coefficients[c](i));
    coeffs.add_row(row);
  }
  emit(report, config, "coeffs.csv", coeffs);
}

// ACF of the final maximizing combination with its lag window.
void emit_acf_window(ExperimentReport& report, const ExperimentConfig& config, const ObservableSeries& basis) {
  const Eigen::VectorXd& a = report.coefficients.back();
  if (!a.allFinite()) return;
  const Eigen::VectorXd combined = basis.values().transpose() * a;
  TauOptions opts;
  opts.doubling_levels = config.tau_options.doubling_levels;
  opts.max_lags = config.tau_options.max_lags;
  const TauEstimate est = estimate_tau(std::span<const double>(combined.data(), static_cast<std::size_t>(combined.size())), opts);
  CsvWriter csv({"k", "acf", "w"});
  for (std::size_t k = 0; k < est.acf.size(); ++k) {
    const double row[3] = {static_cast<double>(k), est.acf[k], est.window.weights[k]};
    csv.add_row(std::span<const double>(row, 3));
  }
  emit(report, config, "acf_window.csv", csv);
}

void emit_trajectory(ExperimentReport& report, const ExperimentConfig& config, const RowMatrix& states) {
  std::vector<std::string> header{"index"};
  for (Eigen::Index j = 0; j < states.cols(); ++j) header.push_back("q_" + std::to_string(j + 1));
  CsvWriter csv(header);
  const Eigen::Index rows = std::min<Eigen::Index>(states.rows(), static_cast<Eigen::Index>(config.trajectory_rows));
  std::vector<double> row(static_cast<std::size_t>(states.cols()) + 1);
  for (Eigen::Index t = 0; t < rows; ++t) {
    row[0] = static_cast<double>(t);
    for (Eigen::Index j = 0; j < states.cols(); ++j) row[static_cast<std::size_t>(j) + 1] = states(t, j);
    csv.add_row(row);
  }
  emit(report, config, "trajectory.csv", csv);
}

void emit_errors(ExperimentReport& report, const ExperimentConfig& config) {
  CsvWriter csv({"n", "metric", "value"});
  for (const auto& e : report.errors) {
    const std::string cells[3] = {std::to_string(e.n), e.metric, format_double(e.value)};
    csv.add_row(std::span<const std::string>(cells, 3));
  }
  emit(report, config, "errors.csv", csv);
}

Eigen::VectorXd initial_or(const ExperimentConfig& config, Eigen::VectorXd fallback) {
  if (!config.initial) return fallback;
  if (config.initial->size() != fallback.size()) {
    throw DimensionError("initial state has dimension " + std::to_string(config.initial->size()) + ", expected " +
                         std::to_string(fallback.size()));
  }
  return *config.initial;
}

}  // namespace

std::vector<std::size_t> default_checkpoints(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t decade = 100; decade <= 1000000; decade *= 10) {
    if (decade <= n) out.push_back(decade);
    if (decade * 3 <= n && decade * 3 <= 1000000) out.push_back(decade * 3);
  }
  if (out.empty() || out.back() != n) out.push_back(n);
  return out;
}

std::vector<std::string> experiment_ids() { return {"gaussian1d", "lmixture", "nn1", "logistic"}; }

ExperimentConfig default_experiment_config(std::string_view id) {
  ExperimentConfig c;
  c.id = std::string(id);
  c.sampler = SamplerKind::em;
  c.chain.seed = 2016;
  if (id == "gaussian1d") {
    c.chain.step_size = 0.02;
    c.chain.stride = 5;
    c.n_samples = 1000000;
    c.ensemble = 12;
    c.compare_acor = true;
  } else if (id == "lmixture") {
    c.chain.step_size = 0.02;
    c.chain.stride = 5;
    c.n_samples = 1000000;
    c.compare_acor = true;
  } else if (id == "nn1") {
    // Δt = 0.01 is unstable for Euler-Maruyama on this posterior (curvature
    // βn = 250 along q4); 0.005 with stride 20 keeps the 0.1 time interval.
    c.chain.step_size = 0.005;
    c.chain.stride = 20;
    c.n_samples = 100000;
  } else if (id == "logistic") {
    c.chain.step_size = 0.05;
    c.chain.stride = 1;
    c.n_samples = 100000;
  } else {
    throw ConfigError("unknown experiment '" + std::string(id) + "' (expected gaussian1d, lmixture, nn1, logistic)");
  }
  return c;
}

double ExperimentReport::tau(std::size_t n, std::string_view observable, std::size_t run) const {
  const std::string key = run_prefix(run) + std::string(observable);
  for (const auto& r : tau_rows) {
    if (r.n == n && r.observable == key) return r.tau;
  }
  return kNaN;
}

double ExperimentReport::error(std::size_t n, std::string_view metric) const {
  for (const auto& e : errors) {
    if (e.n == n && e.metric == metric) return e.value;
  }
  return kNaN;
}

std::vector<double> ExperimentReport::ensemble_tau_max(std::size_t n) const {
  std::vector<double> out;
  for (const auto& r : tau_rows) {
    if (r.n != n) continue;
    const auto slash = r.observable.find('/');
    const std::string_view base = slash == std::string::npos ? std::string_view(r.observable)
                                                             : std::string_view(r.observable).substr(slash + 1);
    if (base == "tau_max" && !r.observable.starts_with("median/")) out.push_back(r.tau);
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.id == "gaussian1d") return run_gaussian1d(config);
  if (config.id == "lmixture") return run_lmixture(config);
  if (config.id == "nn1") return run_nn1(config);
  if (config.id == "logistic") return run_logistic(config);
  throw ConfigError("unknown experiment '" + config.id + "'");
}

ExperimentReport run_gaussian1d(const ExperimentConfig& config) {
  const StdGaussianTarget target(1);
  Analysis analysis{&target, gauss1d_observables(), {}};
  const Eigen::VectorXd initial = initial_or(config, Eigen::VectorXd::Zero(1));
  Trajectory t;
  ExperimentReport report = assemble(config, analysis, initial, t);

  emit_tau_and_coeffs(report, config, analysis.basis.size());
  if (!config.out_dir.empty()) {
    emit_acf_window(report, config, evaluate_observables(t.states, analysis.basis));
  }
  return report;
}

ExperimentReport run_lmixture(const ExperimentConfig& config) {
  const LMixtureTarget target;
  Analysis analysis{&target, coordinate_observables(2), {}};
  const Eigen::VectorXd initial = initial_or(config, Eigen::Vector2d(2.0, 0.0));
  Trajectory t;
  ExperimentReport report = assemble(config, analysis, initial, t);

  emit_tau_and_coeffs(report, config, 2);
  if (!config.out_dir.empty()) {
    emit_trajectory(report, config, t.states);
    emit_acf_window(report, config, evaluate_observables(t.states, analysis.basis));
  }
  return report;
}

ExperimentReport run_nn1(const ExperimentConfig& config) {
  const RegressionData data = config.data_path.empty() ? generate_nn_fixture() : read_regression_csv(config.data_path);
  const OneNodeNNTarget target(data.x, data.y);
  ObservableContext ctx;
  ctx.nn_x1 = data.x.front();
  Analysis analysis{&target, coordinate_observables(4), parse_observables("nn:pred", 4, ctx)};
  const Eigen::VectorXd initial = initial_or(config, Eigen::VectorXd::Zero(4));
  Trajectory t;
  ExperimentReport report = assemble(config, analysis, initial, t);

  // Posterior-mean prediction ū(x_i) over each prefix, and its MSE.
  const std::size_t m = data.x.size();
  std::vector<double> sums(m, 0.0);
  std::size_t done = 0;
  for (std::size_t n : report.checkpoints) {
    for (; done < n; ++done) {
      const std::span<const double> q(t.states.row(static_cast<Eigen::Index>(done)).data(), 4);
      for (std::size_t i = 0; i < m; ++i) sums[i] += OneNodeNNTarget::predict(q, data.x[i]);
    }
    double mse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = data.y[i] - sums[i] / static_cast<double>(n);
      mse += r * r;
    }
    report.errors.push_back({n, "mse", mse / static_cast<double>(m)});
  }

  emit_tau_and_coeffs(report, config, 4);
  emit_errors(report, config);
  if (!config.out_dir.empty()) {
    CsvWriter pred({"x", "y", "u_bar"});
    for (std::size_t i = 0; i < m; ++i) {
      const double row[3] = {data.x[i], data.y[i], sums[i] / static_cast<double>(done)};
      pred.add_row(std::span<const double>(row, 3));
    }
    emit(report, config, "prediction.csv", pred);
    emit_trajectory(report, config, t.states);

    const ObservableSeries basis = evaluate_observables(t.states, analysis.basis);
    const Eigen::VectorXd& a = report.coefficients.back();
    if (a.allFinite()) {
      CsvWriter umax({"index", "q_1", "u_max"});
      const Eigen::Index rows = std::min<Eigen::Index>(t.states.rows(), static_cast<Eigen::Index>(config.trajectory_rows));
      for (Eigen::Index k = 0; k < rows; ++k) {
        const double row[3] = {static_cast<double>(k), t.states(k, 0), t.states.row(k).dot(a)};
        umax.add_row(std::span<const double>(row, 3));
      }
      emit(report, config, "max_observable.csv", umax);
    }
    emit_acf_window(report, config, basis);
  }
  return report;
}

int predicted_label(double probability) { return probability >= 0.5 ? 1 : 0; }

Eigen::VectorXd find_map(const Target& target, const Eigen::VectorXd& start, double grad_tol, std::size_t max_iters) {
  Eigen::VectorXd q = start;
  Evaluation e = target.evaluate(q);
  double step = 1.0;
  for (std::size_t it = 0; it < max_iters && e.gradient.norm() > grad_tol; ++it) {
    // Backtracking with the Armijo condition. Near the minimum the energy
    // change drops below rounding, so a shrinking gradient also counts.
    const double g2 = e.gradient.squaredNorm();
    const double noise = 1e-13 * (1.0 + std::abs(e.energy));
    for (;;) {
      const Eigen::VectorXd trial = q - step * e.gradient;
      const Evaluation et = target.evaluate(trial);
      const bool armijo = et.energy <= e.energy - 0.5 * step * g2;
      const bool flat = std::abs(et.energy - e.energy) <= noise && et.gradient.squaredNorm() < g2;
      if (std::isfinite(et.energy) && (armijo || flat)) {
        q = trial;
        e = et;
        step *= 1.5;
        break;
      }
      step *= 0.5;
      if (step < 1e-300) return q;
    }
  }
  return q;
}

double logistic_max_curvature(const LogisticTarget& target, const Eigen::VectorXd& q) {
  const Eigen::MatrixXd& x = target.features();
  const Eigen::VectorXd s = (x * q).unaryExpr([](double z) { return LogisticTarget::sigmoid(z); });
  const Eigen::VectorXd w = (s.array() * (1.0 - s.array())).matrix();
  Eigen::MatrixXd h = target.beta() * x.transpose() * w.asDiagonal() * x;
  h.diagonal().array() += target.alpha();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(h.rows() - 1);
}

ExperimentReport run_logistic(const ExperimentConfig& config) {
  Dataset ds = config.data_path.empty() ? parse_australian(synthetic_australian_text(kAustralianRows, config.data_seed))
                                        : load_australian(config.data_path);
  const Eigen::MatrixXd x_train = ds.rows(ds.train), x_test = ds.rows(ds.test);
  const Eigen::VectorXd y_train = ds.labels_of(ds.train), y_test = ds.labels_of(ds.test);
  const LogisticTarget target(x_train, y_train);
  const auto dim = static_cast<std::size_t>(x_train.cols());

  ObservableContext ctx;
  ctx.logistic_x1 = x_train.row(0).transpose();
  Analysis analysis{&target, coordinate_observables(dim), parse_observables("logit:pred", dim, ctx)};
  const Eigen::VectorXd initial = initial_or(config, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
  Trajectory t;
  ExperimentReport report = assemble(config, analysis, initial, t);
  report.notes.push_back("data: " + (config.data_path.empty() ? "synthetic rows, seed " + std::to_string(config.data_seed)
                                                                : config.data_path.string()) +
                         " (" + ds.provenance + ")");
  for (const auto& w : ds.warnings) report.notes.push_back("warning: " + w);

  const Eigen::VectorXd map = find_map(target, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
  auto error_rate = [](const Eigen::VectorXd& prob, const Eigen::VectorXd& y) {
    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) wrong += predicted_label(prob(i)) != (y(i) > 0.5 ? 1 : 0);
    return static_cast<double>(wrong) / static_cast<double>(y.size());
  };
  auto sig = [](double z) { return LogisticTarget::sigmoid(z); };
  report.errors.push_back({0, "map_train_error", error_rate((x_train * map).unaryExpr(sig), y_train)});
  report.errors.push_back({0, "map_test_error", error_rate((x_test * map).unaryExpr(sig), y_test)});
  const double curvature = logistic_max_curvature(target, map);
  report.notes.push_back("largest curvature at the MAP " + format_double(curvature) + ", dt * curvature = " +
                         format_double(curvature * config.chain.step_size));

  // σ̄(x) over each prefix for every example.
  Eigen::VectorXd sum_train = Eigen::VectorXd::Zero(x_train.rows()), sum_test = Eigen::VectorXd::Zero(x_test.rows());
  std::size_t done = 0;
  for (std::size_t n : report.checkpoints) {
    if (n > done) {
      const auto block = t.states.middleRows(static_cast<Eigen::Index>(done), static_cast<Eigen::Index>(n - done));
      sum_train += (x_train * block.transpose()).unaryExpr(sig).rowwise().sum();
      sum_test += (x_test * block.transpose()).unaryExpr(sig).rowwise().sum();
      done = n;
    }
    report.errors.push_back({n, "train_error", error_rate(sum_train / static_cast<double>(n), y_train)});
    report.errors.push_back({n, "test_error", error_rate(sum_test / static_cast<double>(n), y_test)});
  }

  emit_tau_and_coeffs(report, config, dim);
  emit_errors(report, config);
  if (!config.out_dir.empty()) emit_acf_window(report, config, evaluate_observables(t.states, analysis.basis));
  return report;
}

}  // namespace taumax
