#include "taumax/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "fft.hpp"
#include "taumax/errors.hpp"

namespace taumax {
namespace {

double mean_of(std::span<const double> x) {
  // Two-pass mean: the correction term removes most of the rounding error.
  double sum = 0.0;
  for (double v : x) sum += v;
  const double m = sum / static_cast<double>(x.size());
  double corr = 0.0;
  for (double v : x) corr += v - m;
  return m + corr / static_cast<double>(x.size());
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> centred_copy(std::span<const double> x) {
  const double m = mean_of(x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - m;
  return out;
}

void check_lags(std::size_t lags, std::size_t n) {
  if (lags == 0) throw ConfigError("at least one lag is required");
  if (lags > n) {
    throw ConfigError("requested " + std::to_string(lags) + " lags from a series of length " + std::to_string(n));
  }
}

// Σ_n a_n b_{n+k} for k = 0..lags-1 (and, when `negative` is given, Σ_n a_{n+k} b_n)
// from the spectra of the zero-padded series.
void correlate(detail::RealFft& fft, const std::vector<std::complex<double>>& a,
               const std::vector<std::complex<double>>& b, std::vector<std::complex<double>>& scratch,
               std::vector<double>& out) {
  scratch.resize(a.size());
  for (std::size_t f = 0; f < a.size(); ++f) scratch[f] = std::conj(a[f]) * b[f];
  fft.inverse(scratch, out);
}

}  // namespace

bool is_degenerate_variance(double c0, double scale) {
  const double floor = 1e-12 * scale;
  return !(c0 > floor * floor) || !std::isfinite(c0);
}

// --- ObservableSeries ---------------------------------------------------------

ObservableSeries::ObservableSeries(RowMatrix raw, std::vector<std::string> labels)
    : values_(std::move(raw)), labels_(std::move(labels)) {
  if (values_.rows() < 1) throw DimensionError("observable series needs at least one row");
  if (values_.cols() < 2) throw DimensionError("observable series needs at least two samples");
  if (labels_.empty()) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) labels_.push_back("u" + std::to_string(i + 1));
  }
  if (labels_.size() != static_cast<std::size_t>(values_.rows())) {
    throw DimensionError("observable labels do not match the number of rows");
  }
  means_.resize(values_.rows());
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    const double m = mean_of(std::span<const double>(values_.row(i).data(), length()));
    means_[i] = m;
    values_.row(i).array() -= m;
  }
}

ObservableSeries ObservableSeries::prefix(std::size_t n) const {
  if (n > length()) throw DimensionError("prefix longer than series");
  RowMatrix raw = values_.leftCols(static_cast<Eigen::Index>(n));
  raw.colwise() += means_;
  return ObservableSeries(std::move(raw), labels_);
}

ObservableSeries ObservableSeries::select(std::span<const std::size_t> rows) const {
  RowMatrix raw(static_cast<Eigen::Index>(rows.size()), values_.cols());
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= dimension()) throw DimensionError("row index out of range");
    raw.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r])).array() +
                                            means_[static_cast<Eigen::Index>(rows[r])];
    labels.push_back(labels_[rows[r]]);
  }
  return ObservableSeries(std::move(raw), std::move(labels));
}

// --- Estimators ---------------------------------------------------------------

CovSeq autocovariance(std::span<const double> series, std::size_t lags) {
  const std::size_t n = series.size();
  if (n < 2) throw DimensionError("autocovariance needs at least two samples");
  check_lags(lags, n);

  const std::vector<double> x = centred_copy(series);
  detail::RealFft fft(detail::correlation_length(n));
  std::vector<std::complex<double>> spectrum, scratch;
  std::vector<double> corr;
  fft.forward(x, spectrum);
  correlate(fft, spectrum, spectrum, scratch, corr);

  const double norm = 1.0 / (static_cast<double>(fft.length()) * static_cast<double>(n));
  CovSeq out;
  out.n_samples = n;
  out.values.resize(lags);
  for (std::size_t k = 0; k < lags; ++k) out.values[k] = corr[k] * norm;
  if (is_degenerate_variance(out.values[0], max_abs(series))) {
    throw DegenerateSeriesError("series is constant (zero variance)");
  }
  return out;
}

CrossCovSeq cross_covariance_matrices(const ObservableSeries& series, std::size_t lags, bool symmetrize) {
  const std::size_t n = series.length();
  const std::size_t d = series.dimension();
  check_lags(lags, n);

  detail::RealFft fft(detail::correlation_length(n));
  std::vector<std::vector<std::complex<double>>> spectra(d);
  for (std::size_t i = 0; i < d; ++i) fft.forward(series.row(i), spectra[i]);

  const double norm = 1.0 / (static_cast<double>(fft.length()) * static_cast<double>(n));
  const auto di = static_cast<Eigen::Index>(d);
  CrossCovSeq out;
  out.n_samples = n;
  out.values.assign(lags, Eigen::MatrixXd::Zero(di, di));

  std::vector<std::complex<double>> scratch;
  std::vector<double> corr;
  const std::size_t len = fft.length();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      correlate(fft, spectra[i], spectra[j], scratch, corr);
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      for (std::size_t k = 0; k < lags; ++k) {
        // corr[k] = Σ u_i(n) u_j(n+k); corr[len-k] = Σ u_j(n) u_i(n+k).
        out.values[k](ii, jj) = corr[k] * norm;
        out.values[k](jj, ii) = corr[k == 0 ? 0 : len - k] * norm;
      }
    }
  }

  for (std::size_t i = 0; i < d; ++i) {
    const double c0 = out.values[0](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    const double scale = std::max(max_abs(series.row(i)), std::abs(series.means()[static_cast<Eigen::Index>(i)]));
    if (is_degenerate_variance(c0, scale)) {
      throw DegenerateSeriesError("observable '" + series.labels()[i] + "' is constant (zero variance)");
    }
  }
  if (symmetrize) {
    for (auto& c : out.values) c = (0.5 * (c + c.transpose())).eval();
  }
  return out;
}

DoublingResult doubling_transform(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) throw DimensionError("doubling transform needs at least four samples");
  const std::vector<double> u = centred_copy(series);

  double cu0 = 0.0;
  for (double v : u) cu0 += v * v;
  cu0 /= static_cast<double>(n);
  if (is_degenerate_variance(cu0, max_abs(series))) throw DegenerateSeriesError("series is constant (zero variance)");

  DoublingResult out;
  const std::size_t half = n / 2;
  out.series.resize(half);
  for (std::size_t i = 0; i < half; ++i) out.series[i] = u[2 * i] + u[2 * i + 1];

  const double mv = mean_of(out.series);
  double cv0 = 0.0;
  for (double v : out.series) cv0 += (v - mv) * (v - mv);
  cv0 /= static_cast<double>(half);
  out.variance_ratio = cv0 / cu0;
  return out;
}

RowMatrix doubling_transform_rows(const RowMatrix& centred) {
  const Eigen::Index half = centred.cols() / 2;
  if (centred.cols() < 4) throw DimensionError("doubling transform needs at least four samples");
  RowMatrix out(centred.rows(), half);
  for (Eigen::Index r = 0; r < centred.rows(); ++r) {
    for (Eigen::Index i = 0; i < half; ++i) out(r, i) = centred(r, 2 * i) + centred(r, 2 * i + 1);
  }
  return out;
}

std::vector<double> doubled_covariances(std::span<const double> c) {
  if (c.size() < 3) throw DimensionError("need covariances up to lag 2 at least");
  const std::size_t out_lags = (c.size() - 1) / 2;
  std::vector<double> out(out_lags);
  for (std::size_t k = 0; k < out_lags; ++k) {
    const double before = k == 0 ? c[1] : c[2 * k - 1];
    out[k] = 2.0 * c[2 * k] + before + c[2 * k + 1];
  }
  return out;
}

}  // namespace taumax
