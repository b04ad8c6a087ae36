#include "taumax/samplers.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "taumax/errors.hpp"

namespace taumax {
namespace {

std::span<double> view(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

bool all_finite(double energy, const Eigen::VectorXd& grad) {
  return std::isfinite(energy) && grad.allFinite();
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Chain state with the potential and gradient at q cached between steps, so
// every kernel costs one gradient evaluation per force evaluation it needs.
class Walker {
  const Target& target_;

 public:
  Walker(const Target& target, const Eigen::VectorXd& q)
      : target_(target), q(q), p(Eigen::VectorXd::Zero(q.size())), grad(q.size()), q_prop(q.size()),
        p_prop(q.size()), grad_prop(q.size()), noise(q.size()) {
    if (static_cast<std::size_t>(q.size()) != target.dimension()) {
      throw DimensionError("initial state has dimension " + std::to_string(q.size()) + ", target '" +
                           target.label() + "' has " + std::to_string(target.dimension()));
    }
    energy = target_.evaluate(view(this->q), view(grad));
    if (!all_finite(energy, grad)) throw NonFiniteError("non-finite potential at initial state", to_std(q));
  }

  void em(double dt, Rng& rng) {
    rng.fill_normal(noise);
    em_with_noise(dt);
  }

  void em_with_noise(double dt) {
    q += -dt * grad + std::sqrt(2.0 * dt) * noise;
    energy = target_.evaluate(view(q), view(grad));
    if (!all_finite(energy, grad)) throw NonFiniteError("non-finite gradient after Euler-Maruyama step", to_std(q));
  }

  double mala_with_noise(double dt, double uniform, bool& accepted) {
    q_prop = q - dt * grad + std::sqrt(2.0 * dt) * noise;
    energy_prop = target_.evaluate(view(q_prop), view(grad_prop));
    if (!all_finite(energy_prop, grad_prop)) {
      throw NonFiniteError("non-finite gradient at MALA proposal", to_std(q_prop));
    }
    const double log_ratio = -energy_prop + energy + log_proposal(q, q_prop, grad_prop, dt) -
                             log_proposal(q_prop, q, grad, dt);
    accepted = std::log(uniform) < log_ratio;
    if (accepted) accept_proposal();
    return std::min(1.0, std::exp(log_ratio));
  }

  bool mala(double dt, Rng& rng) {
    rng.fill_normal(noise);
    bool accepted = false;
    mala_with_noise(dt, rng.uniform(), accepted);
    return accepted;
  }

  // Leapfrog on the proposal buffers. Returns false if the trajectory left
  // the finite domain.
  bool leapfrog_proposal(double dt, std::size_t steps) {
    for (std::size_t s = 0; s < steps; ++s) {
      p_prop -= 0.5 * dt * grad_prop;
      q_prop += dt * p_prop;
      energy_prop = target_.evaluate(view(q_prop), view(grad_prop));
      if (!all_finite(energy_prop, grad_prop)) return false;
      p_prop -= 0.5 * dt * grad_prop;
    }
    return p_prop.allFinite();
  }

  void start_proposal() {
    q_prop = q;
    p_prop = p;
    grad_prop = grad;
    energy_prop = energy;
  }

  double hmc(double dt, std::size_t steps, Rng& rng, bool& accepted) {
    rng.fill_normal(p);
    const double h0 = energy + 0.5 * p.squaredNorm();
    start_proposal();
    const bool finite = leapfrog_proposal(dt, steps);
    const double dh = finite ? energy_prop + 0.5 * p_prop.squaredNorm() - h0
                             : std::numeric_limits<double>::infinity();
    const double u = rng.uniform();
    accepted = std::isfinite(dh) && std::log(u) < -dh;
    if (accepted) accept_proposal();
    return dh;
  }

  bool ghmc(double dt, double angle, bool flip, Rng& rng) {
    rng.fill_normal(noise);
    p = std::cos(angle) * p + std::sin(angle) * noise;
    const double h0 = energy + 0.5 * p.squaredNorm();
    start_proposal();
    const bool finite = leapfrog_proposal(dt, 1);
    const double dh = finite ? energy_prop + 0.5 * p_prop.squaredNorm() - h0
                             : std::numeric_limits<double>::infinity();
    const double u = rng.uniform();
    const bool accepted = std::isfinite(dh) && std::log(u) < -dh;
    if (accepted) {
      accept_proposal();
      // The involutive proposal is (q*, -p*); the optional flip undoes the sign.
      if (!flip) p = -p;
    } else if (flip) {
      p = -p;
    }
    return accepted;
  }

  void langevin(double dt, const OStage& o, Rng& rng) {
    rng.fill_normal(noise);
    langevin_with_noise(dt, o);
  }

  void langevin_with_noise(double dt, const OStage& o) {
    p -= 0.5 * dt * grad;                  // B
    q += 0.5 * dt * p;                     // A
    p = o.damping * p + o.noise * noise;   // O
    q += 0.5 * dt * p;                     // A
    energy = target_.evaluate(view(q), view(grad));
    if (!all_finite(energy, grad)) throw NonFiniteError("non-finite gradient in Langevin step", to_std(q));
    p -= 0.5 * dt * grad;                  // B
  }

  Eigen::VectorXd q, p, grad;
  Eigen::VectorXd q_prop, p_prop, grad_prop;
  Eigen::VectorXd noise;
  double energy = 0.0;
  double energy_prop = 0.0;

 private:
  static double log_proposal(const Eigen::VectorXd& to, const Eigen::VectorXd& from,
                             const Eigen::VectorXd& grad_from, double dt) {
    return -(to - from + dt * grad_from).squaredNorm() / (4.0 * dt);
  }

  void accept_proposal() {
    q.swap(q_prop);
    p.swap(p_prop);
    grad.swap(grad_prop);
    energy = energy_prop;
  }
};

void require_positive_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("step size must be positive and finite");
}

}  // namespace

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::em: return "em";
    case SamplerKind::mala: return "mala";
    case SamplerKind::hmc: return "hmc";
    case SamplerKind::ghmc: return "ghmc";
    case SamplerKind::langevin: return "langevin";
    case SamplerKind::elm: return "elm";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  for (auto kind : {SamplerKind::em, SamplerKind::mala, SamplerKind::hmc, SamplerKind::ghmc, SamplerKind::langevin,
                    SamplerKind::elm}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("unknown sampler '" + std::string(name) + "' (expected em, mala, hmc, ghmc, langevin, elm)");
}

bool has_momentum(SamplerKind kind) {
  return kind == SamplerKind::ghmc || kind == SamplerKind::langevin || kind == SamplerKind::elm;
}

void ChainConfig::validate(SamplerKind kind) const {
  require_positive_step(step_size);
  if (n_steps == 0) throw ConfigError("n_steps must be positive");
  if (stride == 0) throw ConfigError("stride must be positive");
  if (burn_in >= n_steps) throw ConfigError("burn_in must be smaller than n_steps");
  if (retained() == 0) throw ConfigError("configuration retains no states");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
  if (kind == SamplerKind::langevin) langevin_o_stage(step_size, gamma);
  if (kind == SamplerKind::hmc && hmc_leapfrog_steps == 0) throw ConfigError("hmc needs at least one leapfrog step");
  if (kind == SamplerKind::ghmc && !(ghmc_mix_angle > 0.0 && ghmc_mix_angle <= std::numbers::pi / 2.0)) {
    throw ConfigError("ghmc mixing angle must lie in (0, pi/2]");
  }
}

std::size_t ChainConfig::retained() const { return n_steps > burn_in ? (n_steps - burn_in) / stride : 0; }

Eigen::VectorXd em_brownian_update(const Target& target, const Eigen::VectorXd& q, double dt,
                                   const Eigen::VectorXd& noise) {
  require_positive_step(dt);
  Walker w(target, q);
  if (noise.size() != q.size()) throw DimensionError("noise has the wrong dimension");
  w.noise = noise;
  w.em_with_noise(dt);
  return w.q;
}

Eigen::VectorXd em_brownian_step(const Target& target, const Eigen::VectorXd& q, double dt, Rng& rng) {
  require_positive_step(dt);
  Walker w(target, q);
  w.em(dt, rng);
  return w.q;
}

double mala_log_ratio(const Target& target, const Eigen::VectorXd& from, const Eigen::VectorXd& to, double dt) {
  require_positive_step(dt);
  const Evaluation a = target.evaluate(from);
  const Evaluation b = target.evaluate(to);
  const double log_fwd = -(to - from + dt * a.gradient).squaredNorm() / (4.0 * dt);
  const double log_bwd = -(from - to + dt * b.gradient).squaredNorm() / (4.0 * dt);
  return -b.energy + a.energy + log_bwd - log_fwd;
}

MalaResult mala_update(const Target& target, const Eigen::VectorXd& q, double dt, const Eigen::VectorXd& noise,
                       double uniform) {
  require_positive_step(dt);
  Walker w(target, q);
  if (noise.size() != q.size()) throw DimensionError("noise has the wrong dimension");
  w.noise = noise;
  MalaResult out;
  out.acceptance_probability = w.mala_with_noise(dt, uniform, out.accepted);
  out.q = w.q;
  return out;
}

MalaResult mala_step(const Target& target, const Eigen::VectorXd& q, double dt, Rng& rng) {
  require_positive_step(dt);
  Walker w(target, q);
  rng.fill_normal(w.noise);
  MalaResult out;
  out.acceptance_probability = w.mala_with_noise(dt, rng.uniform(), out.accepted);
  out.q = w.q;
  return out;
}

void leapfrog(const Target& target, PhaseState& state, double dt, std::size_t steps) {
  require_positive_step(dt);
  Walker w(target, state.q);
  if (state.p.size() != state.q.size()) throw DimensionError("momentum has the wrong dimension");
  w.p = state.p;
  w.start_proposal();
  if (!w.leapfrog_proposal(dt, steps)) {
    throw NonFiniteError("leapfrog integration left the finite domain", to_std(w.q_prop));
  }
  state.q = w.q_prop;
  state.p = w.p_prop;
}

double hamiltonian(const Target& target, const PhaseState& state) {
  return target.evaluate(state.q).energy + 0.5 * state.p.squaredNorm();
}

HmcResult hmc_step(const Target& target, const Eigen::VectorXd& q, double dt, std::size_t leapfrog_steps, Rng& rng) {
  require_positive_step(dt);
  if (leapfrog_steps == 0) throw ConfigError("hmc needs at least one leapfrog step");
  Walker w(target, q);
  HmcResult out;
  out.energy_error = w.hmc(dt, leapfrog_steps, rng, out.accepted);
  out.q = w.q;
  return out;
}

GhmcResult ghmc_step(const Target& target, const PhaseState& state, double dt, double angle, Rng& rng, bool flip) {
  require_positive_step(dt);
  if (!(angle > 0.0 && angle <= std::numbers::pi / 2.0)) throw ConfigError("ghmc mixing angle must lie in (0, pi/2]");
  Walker w(target, state.q);
  if (state.p.size() != state.q.size()) throw DimensionError("momentum has the wrong dimension");
  w.p = state.p;
  GhmcResult out;
  out.accepted = w.ghmc(dt, angle, flip, rng);
  out.state = {w.q, w.p};
  return out;
}

OStage langevin_o_stage(double dt, double gamma) {
  require_positive_step(dt);
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
  const double c = 2.0 * gamma * dt;
  constexpr double kRoundoff = 1e-12;
  if (c > 1.0 + kRoundoff) {
    throw ConfigError("Langevin O stage needs 2*gamma*dt <= 1 (got " + std::to_string(c) + ")");
  }
  if (c >= 1.0 - kRoundoff) return {0.0, 1.0};
  return {std::sqrt(1.0 - c), std::sqrt(c)};
}

PhaseState reversible_langevin_update(const Target& target, const PhaseState& state, double dt, double gamma,
                                      const Eigen::VectorXd& noise) {
  const OStage o = langevin_o_stage(dt, gamma);
  Walker w(target, state.q);
  if (state.p.size() != state.q.size() || noise.size() != state.q.size()) {
    throw DimensionError("momentum or noise has the wrong dimension");
  }
  w.p = state.p;
  w.noise = noise;
  w.langevin_with_noise(dt, o);
  return {w.q, w.p};
}

PhaseState reversible_langevin_step(const Target& target, const PhaseState& state, double dt, double gamma,
                                    Rng& rng) {
  Eigen::VectorXd noise(state.q.size());
  rng.fill_normal(noise);
  return reversible_langevin_update(target, state, dt, gamma, noise);
}

Trajectory run_chain(const Target& target, SamplerKind kind, const ChainConfig& config,
                     const Eigen::VectorXd& initial) {
  config.validate(kind);
  Walker w(target, initial);
  Rng rng(config.seed, config.chain_id);
  if (has_momentum(kind)) rng.fill_normal(w.p);

  const double dt = config.step_size;
  const double gamma = kind == SamplerKind::elm ? 1.0 / (2.0 * dt) : config.gamma;
  const OStage o = (kind == SamplerKind::langevin || kind == SamplerKind::elm) ? langevin_o_stage(dt, gamma) : OStage{};

  Trajectory out;
  out.config = config;
  out.sampler = kind;
  out.target_label = target.label();
  out.states.resize(static_cast<Eigen::Index>(config.retained()), initial.size());

  std::size_t accepted = 0;
  Eigen::Index row = 0;
  for (std::size_t step = 1; step <= config.n_steps; ++step) {
    try {
      switch (kind) {
        case SamplerKind::em: w.em(dt, rng); ++accepted; break;
        case SamplerKind::mala: accepted += w.mala(dt, rng) ? 1 : 0; break;
        case SamplerKind::hmc: {
          bool ok = false;
          w.hmc(dt, config.hmc_leapfrog_steps, rng, ok);
          accepted += ok ? 1 : 0;
          break;
        }
        case SamplerKind::ghmc: accepted += w.ghmc(dt, config.ghmc_mix_angle, config.ghmc_flip, rng) ? 1 : 0; break;
        case SamplerKind::langevin:
        case SamplerKind::elm: w.langevin(dt, o, rng); ++accepted; break;
      }
    } catch (const Error& e) {
      throw ChainError(e.what(), step);
    }
    if (step > config.burn_in && (step - config.burn_in) % config.stride == 0) {
      out.states.row(row++) = w.q.transpose();
    }
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(config.n_steps);
  return out;
}

}  // namespace taumax
