#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace taumax {

/// (x, y) pairs for the one-node network.
struct RegressionData {
  std::vector<double> x;
  std::vector<double> y;
};

constexpr std::uint64_t kNnFixtureSeed = 20161;

/// x equally spaced on [-3, 3], y = 2 tanh(1.5x + 0.5) + N(0, 1/β).
RegressionData generate_nn_fixture(std::uint64_t seed = kNnFixtureSeed, std::size_t n = 100, double beta = 2.5);

/// CSV with header x,y. Throws ParseError.
RegressionData read_regression_csv(const std::filesystem::path& path);
std::string format_regression_csv(const RegressionData& data);

/// Classification data with a train/test split.
struct Dataset {
  /// n × 15: the 14 attributes standardised with training statistics, then a
  /// constant 1 column.
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  /// "sha256:<hex>" of the source text, or the generator seed.
  std::string provenance;
  std::vector<std::string> warnings;

  Eigen::MatrixXd rows(const std::vector<std::size_t>& index) const;
  Eigen::VectorXd labels_of(const std::vector<std::size_t>& index) const;
};

constexpr std::size_t kAustralianRows = 690;
constexpr std::size_t kAustralianAttributes = 14;
constexpr std::uint64_t kSplitSeed = 4;

/// Reads rows of 14 attributes and a 0/1 class separated by whitespace (or
/// commas). Rows are shuffled with `split_seed` and the first ⌊n/2⌋ form the
/// training set. A row count other than 690 is recorded as a warning.
/// Throws ParseError with the line number for malformed rows.
Dataset parse_australian(std::string_view text, std::uint64_t split_seed = kSplitSeed);
Dataset load_australian(const std::filesystem::path& path, std::uint64_t split_seed = kSplitSeed);

/// Synthetic rows in the same format (mixed binary, categorical, count and
/// skewed continuous attributes; labels from a logistic model).
std::string synthetic_australian_text(std::size_t rows, std::uint64_t seed);

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace taumax
