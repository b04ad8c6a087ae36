#include "taumax/trajectory_io.hpp"

#include <map>
#include <string>

#include "taumax/csv.hpp"
#include "taumax/errors.hpp"

namespace taumax {

std::filesystem::path metadata_path(const std::filesystem::path& csv_path) {
  auto out = csv_path;
  out.replace_extension(".meta");
  return out;
}

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& csv_path) {
  std::vector<std::string> header;
  for (std::size_t i = 0; i < trajectory.dimension(); ++i) header.push_back("q" + std::to_string(i + 1));
  CsvWriter csv(header);
  for (Eigen::Index r = 0; r < trajectory.states.rows(); ++r) {
    csv.add_row(std::span<const double>(trajectory.states.row(r).data(), trajectory.dimension()));
  }

  const ChainConfig& c = trajectory.config;
  const std::map<std::string, std::string> meta{
      {"sampler", std::string(to_string(trajectory.sampler))},
      {"target", trajectory.target_label},
      {"dt", format_double(c.step_size)},
      {"n_steps", std::to_string(c.n_steps)},
      {"stride", std::to_string(c.stride)},
      {"burn_in", std::to_string(c.burn_in)},
      {"seed", std::to_string(c.seed)},
      {"chain_id", std::to_string(c.chain_id)},
      {"gamma", format_double(c.gamma)},
      {"hmc_leapfrog_steps", std::to_string(c.hmc_leapfrog_steps)},
      {"ghmc_mix_angle", format_double(c.ghmc_mix_angle)},
      {"ghmc_flip", c.ghmc_flip ? "true" : "false"},
      {"acceptance_rate", format_double(trajectory.acceptance_rate)},
      {"retained", std::to_string(trajectory.size())},
  };
  csv.write(csv_path);
  write_file_atomic(metadata_path(csv_path), format_key_values(meta));
}

Trajectory read_trajectory(const std::filesystem::path& csv_path) {
  CsvTable table = read_csv(csv_path);
  Eigen::Index first = 0;
  if (!table.header.empty() && table.header.front() == "index") first = 1;

  Trajectory out;
  out.states = table.values.rightCols(table.values.cols() - first);
  if (out.states.cols() == 0) throw ParseError("trajectory has no state columns", 1);

  const auto meta_file = metadata_path(csv_path);
  if (std::filesystem::exists(meta_file)) {
    const auto meta = read_key_values(meta_file);
    auto get = [&](const char* key) -> const std::string* {
      auto it = meta.find(key);
      return it == meta.end() ? nullptr : &it->second;
    };
    try {
      if (auto v = get("sampler")) out.sampler = parse_sampler_kind(*v);
      if (auto v = get("target")) out.target_label = *v;
      if (auto v = get("dt")) out.config.step_size = std::stod(*v);
      if (auto v = get("n_steps")) out.config.n_steps = std::stoull(*v);
      if (auto v = get("stride")) out.config.stride = std::stoull(*v);
      if (auto v = get("burn_in")) out.config.burn_in = std::stoull(*v);
      if (auto v = get("seed")) out.config.seed = std::stoull(*v);
      if (auto v = get("chain_id")) out.config.chain_id = std::stoull(*v);
      if (auto v = get("gamma")) out.config.gamma = std::stod(*v);
      if (auto v = get("hmc_leapfrog_steps")) out.config.hmc_leapfrog_steps = std::stoull(*v);
      if (auto v = get("ghmc_mix_angle")) out.config.ghmc_mix_angle = std::stod(*v);
      if (auto v = get("ghmc_flip")) out.config.ghmc_flip = *v == "true";
      if (auto v = get("acceptance_rate")) out.acceptance_rate = std::stod(*v);
    } catch (const std::logic_error& e) {
      throw ParseError("bad metadata value in '" + meta_file.string() + "': " + e.what(), 0);
    }
  }
  return out;
}

}  // namespace taumax
