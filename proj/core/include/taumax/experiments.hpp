#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "taumax/samplers.hpp"
#include "taumax/tau_max.hpp"
#include "taumax/window.hpp"

namespace taumax {

/// 1e2, 3e2, 1e3, ... up to n, with n appended when it is not on the grid.
std::vector<std::size_t> default_checkpoints(std::size_t n);

struct ExperimentConfig {
  std::string id;
  SamplerKind sampler = SamplerKind::em;
  /// n_steps is derived from n_samples, stride and burn_in.
  ChainConfig chain;
  std::size_t n_samples = 0;
  std::vector<std::size_t> checkpoints;
  std::size_t ensemble = 1;
  /// 0 uses the hardware concurrency.
  std::size_t threads = 0;
  std::optional<Eigen::VectorXd> initial;
  TauMaxOptions tau_options;
  /// Also estimate τ_max with the acor window.
  bool compare_acor = false;
  /// Rows of trajectory.csv (run 0, from the start of the chain).
  std::size_t trajectory_rows = 100000;
  /// Empty: no files are written.
  std::filesystem::path out_dir;
  /// nn1: fixture CSV (empty: the built-in generator). logistic: data file
  /// (empty: synthetic rows in the same format).
  std::filesystem::path data_path;
  std::uint64_t data_seed = 7;
};

/// Defaults for "gaussian1d", "lmixture", "nn1" and "logistic".
/// Throws ConfigError for any other id.
ExperimentConfig default_experiment_config(std::string_view id);
std::vector<std::string> experiment_ids();

struct TauRow {
  std::size_t n = 0;
  /// Observable label; "tau_max" for the maximizer, "run<r>/" prefixed for
  /// ensemble members r >= 1, "[acor]" suffixed for the reference window.
  std::string observable;
  double tau = 0.0;
  double ess = 0.0;
  TauStatus status = TauStatus::ok;
};

struct ErrorRow {
  std::size_t n = 0;
  std::string metric;
  double value = 0.0;
};

struct ExperimentReport {
  std::string id;
  std::vector<std::size_t> checkpoints;
  std::vector<std::string> observables;
  std::vector<TauRow> tau_rows;
  /// Run 0: normalized maximizer coefficients per checkpoint.
  std::vector<Eigen::VectorXd> coefficients;
  std::vector<ErrorRow> errors;
  /// Run 0 acceptance rate.
  double acceptance_rate = 1.0;
  std::vector<std::string> notes;
  std::vector<std::filesystem::path> manifest;

  /// NaN when absent.
  double tau(std::size_t n, std::string_view observable, std::size_t run = 0) const;
  double error(std::size_t n, std::string_view metric) const;
  /// τ_max of every run at checkpoint n.
  std::vector<double> ensemble_tau_max(std::size_t n) const;
};

/// Dispatches on config.id.
ExperimentReport run_experiment(const ExperimentConfig& config);

ExperimentReport run_gaussian1d(const ExperimentConfig& config);
ExperimentReport run_lmixture(const ExperimentConfig& config);
ExperimentReport run_nn1(const ExperimentConfig& config);
ExperimentReport run_logistic(const ExperimentConfig& config);

/// Classifier rule: label 1 when the averaged probability is at least 0.5.
int predicted_label(double probability);

/// Deterministic gradient descent on U until ‖∇U‖ <= grad_tol.
Eigen::VectorXd find_map(const Target& target, const Eigen::VectorXd& start, double grad_tol = 1e-8,
                         std::size_t max_iters = 1000000);

/// Largest eigenvalue of the logistic potential's Hessian at q.
double logistic_max_curvature(const LogisticTarget& target, const Eigen::VectorXd& q);

}  // namespace taumax
