#include "taumax/datasets.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "taumax/csv.hpp"
#include "taumax/errors.hpp"
#include "taumax/rng.hpp"

namespace taumax {
namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  auto sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !sep(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

double parse_number(std::string_view text, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ParseError("not a number: '" + std::string(text) + "'", line);
  }
  return value;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

RegressionData generate_nn_fixture(std::uint64_t seed, std::size_t n, double beta) {
  if (n < 2) throw ConfigError("the fixture needs at least two points");
  Rng rng(seed);
  const double noise_sd = 1.0 / std::sqrt(beta);
  RegressionData d;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    d.x.push_back(x);
    d.y.push_back(2.0 * std::tanh(1.5 * x + 0.5) + noise_sd * rng.normal());
  }
  return d;
}

RegressionData read_regression_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t cx = table.column("x"), cy = table.column("y");
  RegressionData d;
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    d.x.push_back(table.values(r, static_cast<Eigen::Index>(cx)));
    d.y.push_back(table.values(r, static_cast<Eigen::Index>(cy)));
  }
  if (d.x.empty()) throw ParseError("no data rows in '" + path.string() + "'", 0);
  return d;
}

std::string format_regression_csv(const RegressionData& data) {
  CsvWriter w({"x", "y"});
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    const double row[2] = {data.x[i], data.y[i]};
    w.add_row(std::span<const double>(row, 2));
  }
  return w.str();
}

Eigen::MatrixXd Dataset::rows(const std::vector<std::size_t>& index) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(index.size()), features.cols());
  for (std::size_t i = 0; i < index.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(index[i]));
  return out;
}

Eigen::VectorXd Dataset::labels_of(const std::vector<std::size_t>& index) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(index.size()));
  for (std::size_t i = 0; i < index.size(); ++i) out(static_cast<Eigen::Index>(i)) = labels(static_cast<Eigen::Index>(index[i]));
  return out;
}

Dataset parse_australian(std::string_view text, std::uint64_t split_seed) {
  std::vector<std::array<double, kAustralianAttributes + 1>> rows;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != kAustralianAttributes + 1) {
      throw ParseError("expected " + std::to_string(kAustralianAttributes + 1) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    std::array<double, kAustralianAttributes + 1> row{};
    for (std::size_t j = 0; j < fields.size(); ++j) row[j] = parse_number(fields[j], line_no);
    if (row.back() != 0.0 && row.back() != 1.0) throw ParseError("class label must be 0 or 1", line_no);
    rows.push_back(row);
  }
  if (rows.size() < 4) throw ParseError("too few data rows", line_no);

  Dataset ds;
  ds.provenance = "sha256:" + sha256_hex(text);
  if (rows.size() != kAustralianRows) {
    ds.warnings.push_back("expected " + std::to_string(kAustralianRows) + " rows, found " + std::to_string(rows.size()));
  }

  // Seeded Fisher-Yates shuffle, then the first half trains.
  const std::size_t n = rows.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(split_seed, 0x5917);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
  ds.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n / 2));
  ds.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n / 2), order.end());
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.test.begin(), ds.test.end());

  const auto p = static_cast<Eigen::Index>(kAustralianAttributes);
  ds.features.resize(static_cast<Eigen::Index>(n), p + 1);
  ds.labels.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) ds.features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    ds.labels(static_cast<Eigen::Index>(i)) = rows[i].back();
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i : ds.train) mean += ds.features(static_cast<Eigen::Index>(i), j);
    mean /= static_cast<double>(ds.train.size());
    double var = 0.0;
    for (std::size_t i : ds.train) {
      const double dv = ds.features(static_cast<Eigen::Index>(i), j) - mean;
      var += dv * dv;
    }
    var /= static_cast<double>(ds.train.size());
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    ds.features.col(j) = (ds.features.col(j).array() - mean) / sd;
  }
  ds.features.col(p).setOnes();
  return ds;
}

Dataset load_australian(const std::filesystem::path& path, std::uint64_t split_seed) {
  return parse_australian(read_text(path), split_seed);
}

std::string synthetic_australian_text(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed, 0xA057);
  std::ostringstream out;
  auto bern = [&](double p) { return rng.uniform() < p ? 1 : 0; };
  for (std::size_t r = 0; r < rows; ++r) {
    const int a1 = bern(0.68);
    const double a2 = std::min(80.25, 13.75 + 11.0 * std::abs(rng.normal()) + 6.0 * rng.uniform());
    const double a3 = std::min(28.0, std::exp(0.9 * rng.normal()) * 2.5);
    const int a4 = 1 + static_cast<int>(rng.index(3));
    const int a5 = 1 + static_cast<int>(rng.index(14));
    const int a6 = 1 + static_cast<int>(rng.index(9));
    const double a7 = std::min(28.5, std::exp(1.1 * rng.normal()) * 0.9);
    const int a8 = bern(0.52);
    // Employment flag and years employed move together.
    const int a9 = bern(a8 ? 0.62 : 0.22);
    const int a10 = a9 ? 1 + static_cast<int>(std::floor(std::exp(1.0 + 0.8 * rng.normal()))) : 0;
    const int a11 = bern(0.46);
    const int a12 = 1 + static_cast<int>(rng.index(3));
    const int a13 = static_cast<int>(std::min(2000.0, std::floor(std::exp(5.0 + rng.normal()))));
    const int a14 = 1 + static_cast<int>(std::floor(std::exp(3.0 * rng.uniform() * rng.uniform() * 4.0)));

    const double z = -1.6 + 3.6 * a8 + 0.5 * a9 + 0.12 * std::min(a10, 20) + 0.02 * (a2 - 30.0) +
                     0.25 * std::log(static_cast<double>(a14)) + 0.3 * (a5 > 8 ? 1 : -0.2) - 0.4 * (a12 == 3);
    const int label = rng.uniform() < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;

    out << a1 << ' ' << fixed(a2, 2) << ' ' << fixed(a3, 3) << ' ' << a4 << ' ' << a5 << ' ' << a6 << ' '
        << fixed(a7, 3) << ' ' << a8 << ' ' << a9 << ' ' << a10 << ' ' << a11 << ' ' << a12 << ' ' << a13 << ' '
        << a14 << ' ' << label << '\n';
  }
  return out.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace taumax
