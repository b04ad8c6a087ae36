#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "taumax/csv.hpp"
#include "taumax/datasets.hpp"
#include "taumax/errors.hpp"
#include "taumax/experiments.hpp"
#include "taumax/observables.hpp"
#include "taumax/samplers.hpp"
#include "taumax/tau_max.hpp"
#include "taumax/targets.hpp"
#include "taumax/trajectory_io.hpp"
#include "taumax/window.hpp"

namespace taumax::cli {
namespace {

namespace fs = std::filesystem;

struct TargetBundle {
  std::unique_ptr<Target> target;
  ObservableContext context;
  Eigen::VectorXd initial;
};

TargetBundle make_target(const std::string& name, std::size_t dim, const fs::path& data, std::uint64_t data_seed) {
  TargetBundle b;
  if (name == "gaussian") {
    if (dim == 0) throw ConfigError("--dim must be positive");
    b.target = std::make_unique<StdGaussianTarget>(dim);
  } else if (name == "lmixture") {
    b.target = std::make_unique<LMixtureTarget>();
    b.initial = Eigen::Vector2d(2.0, 0.0);
  } else if (name == "nn1") {
    const RegressionData d = data.empty() ? generate_nn_fixture() : read_regression_csv(data);
    b.context.nn_x1 = d.x.front();
    b.target = std::make_unique<OneNodeNNTarget>(d.x, d.y);
  } else if (name == "logistic") {
    const Dataset ds = data.empty() ? parse_australian(synthetic_australian_text(kAustralianRows, data_seed))
                                    : load_australian(data);
    const Eigen::MatrixXd x = ds.rows(ds.train);
    b.context.logistic_x1 = x.row(0).transpose();
    b.target = std::make_unique<LogisticTarget>(x, ds.labels_of(ds.train));
  } else {
    throw ConfigError("unknown target '" + name + "' (expected gaussian, lmixture, nn1, logistic)");
  }
  if (b.initial.size() == 0) b.initial = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b.target->dimension()));
  return b;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError(std::string("bad number '") + item + "' in " + what);
    }
  }
  return out;
}

// Column names in the input file may be used directly as observables.
std::string resolve_columns(const std::string& spec, const std::vector<std::string>& header, std::size_t first) {
  if (spec.empty()) return spec;
  std::stringstream ss(spec);
  std::string item, out;
  while (std::getline(ss, item, ',')) {
    for (std::size_t c = first; c < header.size(); ++c) {
      if (header[c] == item && item.rfind('q', 0) != 0) {
        item = "q" + std::to_string(c - first + 1);
        break;
      }
    }
    out += (out.empty() ? "" : ",") + item;
  }
  return out;
}

struct Input {
  RowMatrix states;
  std::vector<std::string> columns;
};

Input load_input(const fs::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t first = !table.header.empty() && table.header.front() == "index" ? 1 : 0;
  Input in;
  in.states = table.values.rightCols(table.values.cols() - static_cast<Eigen::Index>(first));
  if (in.states.cols() == 0) throw ParseError("no data columns in '" + path.string() + "'", 1);
  in.columns.assign(table.header.begin() + static_cast<std::ptrdiff_t>(first), table.header.end());
  return in;
}

ObservableSeries input_series(const Input& in, const std::string& obs, const std::string& target, const fs::path& data,
                              std::uint64_t data_seed) {
  ObservableContext ctx;
  if (target == "nn1" || target == "logistic") ctx = make_target(target, in.states.cols(), data, data_seed).context;
  std::vector<std::string> header{"index"};
  header.insert(header.end(), in.columns.begin(), in.columns.end());
  const auto observables = parse_observables(resolve_columns(obs, header, 1),
                                             static_cast<std::size_t>(in.states.cols()), ctx);
  return evaluate_observables(in.states, observables);
}

// --- config files ----------------------------------------------------------------

std::string option_key(const CLI::Option* opt) {
  const auto& names = opt->get_lnames();
  return names.empty() ? std::string() : names.front();
}

// "--config FILE" entries become leading arguments, so explicit flags (which
// come later and use the take-last policy) override them.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  std::vector<std::string> rest(args.begin() + 1, args.end());
  if (rest.empty()) return rest;
  CLI::App* sub = nullptr;
  for (auto* s : app.get_subcommands({})) {
    if (s->get_name() == rest.front()) sub = s;
  }
  if (!sub) return rest;

  std::vector<std::string> injected;
  std::vector<std::string> remaining{rest.front()};
  for (std::size_t i = 1; i < rest.size(); ++i) {
    std::string file;
    if (rest[i] == "--config" && i + 1 < rest.size()) {
      file = rest[++i];
    } else if (rest[i].rfind("--config=", 0) == 0) {
      file = rest[i].substr(9);
    } else {
      remaining.push_back(rest[i]);
      continue;
    }
    for (const auto& [key, value] : read_key_values(file)) {
      const CLI::Option* opt = sub->get_option_no_throw("--" + key);
      if (!opt || key == "config" || key == "dump-config" || key == "help") {
        throw ConfigError("unknown key '" + key + "' in config file '" + file + "'");
      }
      if (opt->get_positional()) {
        remaining.push_back(value);
      } else if (opt->get_expected_max() == 0) {
        injected.push_back("--" + key + "=" + (value.empty() ? "false" : value));
      } else if (value.empty()) {
        continue;
      } else {
        injected.push_back("--" + key);
        injected.push_back(value);
      }
    }
  }
  std::vector<std::string> out{remaining.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), remaining.begin() + 1, remaining.end());
  return out;
}

std::string dump_config(const CLI::App& sub) {
  std::map<std::string, std::string> values;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string key = option_key(opt);
    if (key.empty() || key == "config" || key == "dump-config" || key == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      value = r.empty() ? "true" : r.back();
    } else {
      value = opt->get_default_str();
    }
    if (opt->get_expected_max() == 0 && value.empty()) value = "false";
    values[key] = "\"" + value + "\"";
  }
  return format_key_values(values);
}

void add_common(CLI::App* sub, bool* dump) {
  sub->add_option("--config", "Read key = value defaults from FILE (flags override)")->type_name("FILE");
  sub->add_flag("--dump-config", *dump, "Print the resolved configuration as key = value and exit (default: off)");
}

void print_tau_rows(std::ostream& out, std::ostream& err, const ObservableSeries& series,
                    const std::vector<TauEstimate>& est) {
  out << "observable,n,tau,ess,status\n";
  for (std::size_t i = 0; i < est.size(); ++i) {
    out << series.labels()[i] << ',' << series.length() << ',' << format_double(est[i].tau) << ','
        << format_double(est[i].ess) << ',' << to_string(est[i].status) << '\n';
    if (est[i].status != TauStatus::ok) {
      err << "warning: " << series.labels()[i] << ": " << to_string(est[i].status) << " (estimate is advisory)\n";
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Integrated autocorrelation time, ESS and tau_max for MCMC output", "taumax"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  bool dump = false;

  // sample ---------------------------------------------------------------------
  std::string target = "gaussian", sampler = "em", init, data;
  std::size_t dim = 1;
  ChainConfig chain;
  std::uint64_t data_seed = 7;
  std::string out_dir = "sample_out";
  auto* sample = app.add_subcommand("sample", "Run a chain and write trajectory.csv + trajectory.meta");
  add_common(sample, &dump);
  sample->add_option("--target", target, "gaussian | lmixture | nn1 | logistic");
  sample->add_option("--dim", dim, "Dimension of the gaussian target");
  sample->add_option("--sampler", sampler, "em | mala | hmc | ghmc | langevin | elm");
  sample->add_option("--dt", chain.step_size, "Step size");
  sample->add_option("--steps", chain.n_steps, "Number of steps");
  sample->add_option("--stride", chain.stride, "Keep every stride-th state");
  sample->add_option("--burn-in", chain.burn_in, "Steps discarded before retention");
  sample->add_option("--seed", chain.seed, "Random seed");
  sample->add_option("--chain-id", chain.chain_id, "Random stream index");
  sample->add_option("--gamma", chain.gamma, "Langevin friction");
  sample->add_option("--leapfrog", chain.hmc_leapfrog_steps, "Leapfrog steps per HMC proposal");
  sample->add_option("--mix-angle", chain.ghmc_mix_angle, "GHMC momentum mixing angle");
  sample->add_option("--flip", chain.ghmc_flip, "GHMC momentum flip after accept/reject");
  sample->add_option("--init", init, "Initial state, comma-separated (default: target's)");
  sample->add_option("--data", data, "Data file for nn1 / logistic (default: built-in)");
  sample->add_option("--data-seed", data_seed, "Seed of the synthetic logistic data");
  sample->add_option("--out", out_dir, "Output directory");

  // tau ------------------------------------------------------------------------
  std::string input, obs, obs_target, window = "new", acf_out, results_out;
  TauOptions tau_opts;
  auto* tau = app.add_subcommand("tau", "Estimate tau and ESS for each observable of a series");
  add_common(tau, &dump);
  tau->add_option("--input", input, "Trajectory or numeric CSV")->required();
  tau->add_option("--obs", obs, "Observables (default: every column)");
  tau->add_option("--window", window, "new | acor");
  tau->add_option("--doubling", tau_opts.doubling_levels, "Doubling levels before the fit");
  tau->add_option("--max-lags", tau_opts.max_lags, "Lags in the fit (0: automatic)");
  tau->add_option("--target", obs_target, "Target whose data named observables need (nn1 | logistic)");
  tau->add_option("--data", data, "Data file for --target");
  tau->add_option("--acf", acf_out, "Write k,acf,w of the first observable to FILE");
  tau->add_option("--out", results_out, "Also write the table to FILE");

  // tau-max --------------------------------------------------------------------
  TauMaxOptions tm_opts;
  std::string trace_out;
  bool prune = false, no_guard = false;
  auto* tau_max = app.add_subcommand("tau-max", "Estimate tau_max over linear combinations of observables");
  add_common(tau_max, &dump);
  tau_max->add_option("--input", input, "Trajectory or numeric CSV")->required();
  tau_max->add_option("--obs", obs, "Basis observables (default: coordinates)");
  tau_max->add_option("--window", window, "new | acor");
  tau_max->add_option("--tol", tm_opts.tol, "Thoroughness tolerance");
  tau_max->add_option("--rtol", tm_opts.rtol, "Relative change that stops the iteration");
  tau_max->add_option("--max-iters", tm_opts.max_iters, "Iteration cap");
  tau_max->add_option("--doubling", tm_opts.doubling_levels, "Doubling levels before the fit");
  tau_max->add_option("--max-lags", tm_opts.max_lags, "Lags in the fit (0: automatic)");
  tau_max->add_flag("--prune", prune, "Drop collinear observables instead of failing (default: off)");
  tau_max->add_flag("--no-guard", no_guard, "Allow tau_max to decrease between iterations (default: off)");
  tau_max->add_option("--target", obs_target, "Target whose data named observables need (nn1 | logistic)");
  tau_max->add_option("--data", data, "Data file for --target");
  tau_max->add_option("--trace", trace_out, "Write iteration,tau,a_1..a_d,m,status to FILE");

  // reproduce ------------------------------------------------------------------
  std::string experiment, checkpoints;
  std::string repro_out = "results";
  std::size_t samples = 0, ensemble = 0, threads = 0, stride = 0, trajectory_rows = 100000;
  double dt = 0.0;
  std::uint64_t seed = 2016;
  bool no_acor = false;
  auto* reproduce = app.add_subcommand("reproduce", "Run an experiment and write its CSV files");
  add_common(reproduce, &dump);
  reproduce->add_option("experiment", experiment, "gaussian1d | lmixture | nn1 | logistic | all")->required();
  reproduce->add_option("--out", repro_out, "Output root; files go to <out>/<experiment>");
  reproduce->add_option("--samples", samples, "Retained samples per chain (0: experiment default)");
  reproduce->add_option("--ensemble", ensemble, "Independent chains (0: experiment default)");
  reproduce->add_option("--seed", seed, "Random seed");
  reproduce->add_option("--dt", dt, "Step size (0: experiment default)");
  reproduce->add_option("--stride", stride, "Subsampling interval (0: experiment default)");
  reproduce->add_option("--threads", threads, "Worker threads for ensembles (0: all cores)");
  reproduce->add_option("--checkpoints", checkpoints, "Comma-separated sample sizes (default: 1e2, 3e2, ...)");
  reproduce->add_option("--trajectory-rows", trajectory_rows, "Rows written to trajectory.csv");
  reproduce->add_option("--data", data, "Data file (nn1: x,y CSV; logistic: UCI australian.dat)");
  reproduce->add_option("--tol", tm_opts.tol, "Thoroughness tolerance");
  reproduce->add_flag("--no-acor", no_acor, "Skip the acor-window comparison (default: off)");

  try {
    std::vector<std::string> argv_rest = expand_config(args, app);
    std::reverse(argv_rest.begin(), argv_rest.end());
    app.parse(argv_rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    if (dump) {
      out << dump_config(*active);
      return 0;
    }

    if (active == sample) {
      const SamplerKind kind = parse_sampler_kind(sampler);
      TargetBundle b = make_target(target, dim, data, data_seed);
      if (!init.empty()) {
        const auto v = parse_list(init, "--init");
        b.initial = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      }
      const Trajectory t = run_chain(*b.target, kind, chain, b.initial);
      const fs::path path = fs::path(out_dir) / "trajectory.csv";
      write_trajectory(t, path);
      out << path.string() << '\n' << metadata_path(path).string() << '\n';
      err << "retained " << t.size() << " states, acceptance rate " << t.acceptance_rate << '\n';
      return 0;
    }

    if (active == tau) {
      const Input in = load_input(input);
      const ObservableSeries series = input_series(in, obs, obs_target, data, data_seed);
      const WindowKind kind = parse_window_kind(window);
      std::vector<TauEstimate> est;
      for (std::size_t i = 0; i < series.dimension(); ++i) {
        est.push_back(kind == WindowKind::acor ? estimate_tau_acor(series.row(i)) : estimate_tau(series.row(i), tau_opts));
      }
      print_tau_rows(out, err, series, est);
      if (!results_out.empty()) {
        std::ostringstream table;
        std::ostringstream ignore;
        print_tau_rows(table, ignore, series, est);
        write_file_atomic(results_out, table.str());
      }
      if (!acf_out.empty()) {
        CsvWriter csv({"k", "acf", "w"});
        for (std::size_t k = 0; k < est[0].acf.size(); ++k) {
          const double row[3] = {static_cast<double>(k), est[0].acf[k], est[0].window.weights[k]};
          csv.add_row(std::span<const double>(row, 3));
        }
        csv.write(acf_out);
      }
      return 0;
    }

    if (active == tau_max) {
      const Input in = load_input(input);
      const ObservableSeries series = input_series(in, obs, obs_target, data, data_seed);
      tm_opts.window = parse_window_kind(window);
      tm_opts.prune_collinear = prune;
      tm_opts.monotone_guard = !no_guard;
      const TauMaxResult r = estimate_tau_max(series, tm_opts);
      out << "key,value\n";
      out << "tau_max," << format_double(r.tau_max) << '\n';
      out << "ess," << format_double(r.ess) << '\n';
      out << "n," << r.n_samples << '\n';
      out << "status," << to_string(r.status) << '\n';
      out << "iterations," << r.iterations << '\n';
      out << "converged," << (r.stop == StopReason::converged ? "true" : "false") << '\n';
      for (std::size_t i = 0; i < series.dimension(); ++i) {
        out << "a[" << series.labels()[i] << "]," << format_double(r.coefficients(static_cast<Eigen::Index>(i))) << '\n';
      }
      for (std::size_t i = 0; i < series.dimension(); ++i) {
        out << "tau[" << series.labels()[i] << "]," << format_double(r.individual_tau[i]) << '\n';
      }
      out << "tol," << format_double(r.thoroughness.tol) << '\n';
      out << "n_required," << format_double(r.thoroughness.n_required) << '\n';
      out << "thorough," << (r.thoroughness.satisfied ? "true" : "false") << '\n';
      for (std::size_t i : r.dropped_rows) err << "warning: dropped collinear observable " << series.labels()[i] << '\n';
      if (r.status != TauStatus::ok) err << "warning: tau_max status " << to_string(r.status) << '\n';
      if (!r.thoroughness.satisfied) {
        err << "note: N = " << r.n_samples << " is below tau_max/tol^2 = " << r.thoroughness.n_required << '\n';
      }
      if (!trace_out.empty()) {
        std::vector<std::string> header{"iteration", "tau"};
        for (std::size_t i = 0; i < r.kept_rows.size(); ++i) header.push_back("a_" + std::to_string(i + 1));
        header.push_back("m");
        header.push_back("status");
        CsvWriter csv(header);
        for (std::size_t it = 0; it < r.trace.size(); ++it) {
          std::vector<std::string> row{std::to_string(it + 1), format_double(r.trace[it].tau)};
          for (Eigen::Index j = 0; j < r.trace[it].a.size(); ++j) row.push_back(format_double(r.trace[it].a(j)));
          row.push_back(format_double(r.trace[it].window_m));
          row.push_back(std::string(to_string(r.trace[it].status)));
          csv.add_row(row);
        }
        csv.write(trace_out);
      }
      return 0;
    }

    // reproduce
    std::vector<std::string> ids;
    if (experiment == "all") {
      ids = experiment_ids();
    } else {
      default_experiment_config(experiment);  // rejects unknown ids
      ids.push_back(experiment);
    }
    for (const auto& id : ids) {
      ExperimentConfig c = default_experiment_config(id);
      if (samples) c.n_samples = samples;
      if (ensemble) c.ensemble = ensemble;
      if (dt > 0.0) c.chain.step_size = dt;
      if (stride) c.chain.stride = stride;
      c.chain.seed = seed;
      c.threads = threads;
      c.trajectory_rows = trajectory_rows;
      c.tau_options.tol = tm_opts.tol;
      if (no_acor) c.compare_acor = false;
      if (!checkpoints.empty()) {
        for (double v : parse_list(checkpoints, "--checkpoints")) {
          if (!(v >= 1.0)) throw ConfigError("checkpoints must be positive");
          c.checkpoints.push_back(static_cast<std::size_t>(v));
        }
      }
      if (!data.empty() && (id == "nn1" || id == "logistic")) c.data_path = data;
      c.out_dir = fs::path(repro_out) / id;
      const ExperimentReport report = run_experiment(c);
      for (const auto& note : report.notes) err << id << ": " << note << '\n';
      const std::size_t last = report.checkpoints.back();
      err << id << ": tau_max at N = " << last << ": " << report.tau(last, "tau_max") << '\n';
      for (const auto& path : report.manifest) out << path.string() << '\n';
    }
    return 0;
  } catch (const CollinearBasisError& e) {
    err << "error: collinear basis: " << e.what() << " (use --prune to drop dependent observables)\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace taumax::cli
