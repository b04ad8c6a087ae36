#pragma once

#include <filesystem>

#include "taumax/samplers.hpp"

namespace taumax {

/// Sidecar path for a trajectory file: "run.csv" -> "run.meta".
std::filesystem::path metadata_path(const std::filesystem::path& csv_path);

/// Writes the retained states (columns q1..qd) and the sidecar metadata
/// (sampler, target, dt, n_steps, stride, burn_in, seed, chain_id, gamma,
/// acceptance_rate, ...) atomically.
void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& csv_path);

/// Reads a trajectory CSV. An optional leading `index` column is dropped.
/// Metadata is loaded when the sidecar exists.
Trajectory read_trajectory(const std::filesystem::path& csv_path);

}  // namespace taumax
