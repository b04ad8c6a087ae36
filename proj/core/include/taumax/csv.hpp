#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace taumax {

/// Formats with 17 significant digits (round-trips every double).
std::string format_double(double value);

/// Builds a CSV document in memory; write() publishes it atomically.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::span<const std::string> cells);
  void add_row(std::span<const double> values);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_; }
  const std::string& str() const { return body_; }

  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::string body_;
  std::size_t rows_ = 0;
};

/// Numeric CSV with a header row.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values;  ///< rows × columns

  /// Index of a named column; throws ParseError if absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a comma-separated numeric table. Throws ParseError (with line number)
/// on a non-numeric cell or a ragged row.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Flat `key = value` files. Blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);
std::string format_key_values(const std::map<std::string, std::string>& values);

}  // namespace taumax
