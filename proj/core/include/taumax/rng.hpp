#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace taumax {

/// Deterministic per-chain random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Its seed is derived from (seed, stream) by two rounds of
/// SplitMix64, so chain k of an ensemble is reproducible on its own and
/// independent of how many chains run. Normal and uniform variates come from
/// Boost.Random, whose algorithms (ziggurat, 53-bit mantissa fill) do not vary
/// between standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) {
    return boost::random::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  void fill_normal(Eigen::Ref<Eigen::VectorXd> out);

  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
};

}  // namespace taumax
