#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "taumax/rng.hpp"
#include "taumax/targets.hpp"

namespace taumax {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class SamplerKind {
  em,        ///< Euler–Maruyama Brownian dynamics, no rejections
  mala,      ///< Euler–Maruyama proposal + Metropolis test
  hmc,       ///< hybrid Monte Carlo, full momentum refresh
  ghmc,      ///< generalized HMC, partial refresh, one leapfrog per step
  langevin,  ///< five-stage B-A-O-A-B Langevin integrator
  elm,       ///< langevin with γ = 1/(2Δt) (full refresh in the O stage)
};

std::string_view to_string(SamplerKind kind);
/// Throws ConfigError for an unknown name.
SamplerKind parse_sampler_kind(std::string_view name);
bool has_momentum(SamplerKind kind);

struct ChainConfig {
  double step_size = 0.02;
  std::size_t n_steps = 1000;
  /// Keep every stride-th state after burn-in.
  std::size_t stride = 1;
  std::size_t burn_in = 0;
  std::uint64_t seed = 1;
  /// Stream index; members of an ensemble differ only in this.
  std::uint64_t chain_id = 0;
  double gamma = 1.0;
  std::size_t hmc_leapfrog_steps = 10;
  double ghmc_mix_angle = std::numbers::pi / 4.0;
  bool ghmc_flip = true;

  /// Throws ConfigError when the configuration is unusable for `kind`.
  void validate(SamplerKind kind) const;
  /// floor((n_steps - burn_in) / stride)
  std::size_t retained() const;
};

struct Trajectory {
  RowMatrix states;  ///< N × d retained positions
  ChainConfig config;
  SamplerKind sampler = SamplerKind::em;
  std::string target_label;
  double acceptance_rate = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(states.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(states.cols()); }
};

/// Position and momentum of a phase-space sampler.
struct PhaseState {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
};

// --- Brownian dynamics -------------------------------------------------------

/// q' = q - Δt ∇U(q) + √(2Δt) ξ with the given ξ.
Eigen::VectorXd em_brownian_update(const Target& target, const Eigen::VectorXd& q, double dt,
                                   const Eigen::VectorXd& noise);
Eigen::VectorXd em_brownian_step(const Target& target, const Eigen::VectorXd& q, double dt, Rng& rng);

struct MalaResult {
  Eigen::VectorXd q;
  bool accepted = false;
  double acceptance_probability = 0.0;
};

/// log of ρ(to) T(from | to) / (ρ(from) T(to | from)) for the Euler–Maruyama proposal T.
double mala_log_ratio(const Target& target, const Eigen::VectorXd& from, const Eigen::VectorXd& to, double dt);

MalaResult mala_update(const Target& target, const Eigen::VectorXd& q, double dt, const Eigen::VectorXd& noise,
                       double uniform);
MalaResult mala_step(const Target& target, const Eigen::VectorXd& q, double dt, Rng& rng);

// --- Hamiltonian samplers -----------------------------------------------------

/// `steps` velocity-Verlet steps with unit mass, in place.
void leapfrog(const Target& target, PhaseState& state, double dt, std::size_t steps);

/// U(q) + ½‖p‖²
double hamiltonian(const Target& target, const PhaseState& state);

struct HmcResult {
  Eigen::VectorXd q;
  bool accepted = false;
  double energy_error = 0.0;  ///< H(end) - H(start); +inf when integration blew up
};

HmcResult hmc_step(const Target& target, const Eigen::VectorXd& q, double dt, std::size_t leapfrog_steps,
                   Rng& rng);

struct GhmcResult {
  PhaseState state;
  bool accepted = false;
};

/// Partial refresh p ← cos(angle) p + sin(angle) ξ, one leapfrog step and a
/// Metropolis test on the involutive proposal (q*, -p*). With `flip` the
/// momentum is negated afterwards, so acceptance yields (q*, p*) and rejection
/// (q, -p); without it acceptance yields (q*, -p*) and rejection (q, p).
GhmcResult ghmc_step(const Target& target, const PhaseState& state, double dt, double angle, Rng& rng, bool flip);

// --- Reversible Langevin integrator -------------------------------------------

/// Coefficients of the O stage p ← damping·p + noise·ξ.
struct OStage {
  double damping = 1.0;  ///< √(1 - 2γΔt)
  double noise = 0.0;    ///< √(2γΔt)
};

/// Throws ConfigError if 2γΔt > 1. At γ = 1/(2Δt) (within rounding) damping is exactly 0.
OStage langevin_o_stage(double dt, double gamma);

/// Stages B, A, O, A, B with the given ξ for the O stage.
PhaseState reversible_langevin_update(const Target& target, const PhaseState& state, double dt, double gamma,
                                      const Eigen::VectorXd& noise);
PhaseState reversible_langevin_step(const Target& target, const PhaseState& state, double dt, double gamma,
                                    Rng& rng);

// --- Chains --------------------------------------------------------------------

/// Runs `config.n_steps` steps from `initial`, discards burn-in, keeps every
/// stride-th state. Deterministic in (target, kind, config, initial).
/// Step failures are rethrown as ChainError carrying the step index.
Trajectory run_chain(const Target& target, SamplerKind kind, const ChainConfig& config,
                     const Eigen::VectorXd& initial);

}  // namespace taumax
