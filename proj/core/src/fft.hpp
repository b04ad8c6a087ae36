#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace taumax::detail {

/// Smallest power of two >= 2n, so circular correlation of the padded
/// series equals linear correlation.
std::size_t correlation_length(std::size_t n);

/// Real-to-complex / complex-to-real transforms of a fixed length, backed by
/// FFTW. Each instance owns its buffers and plans; plan creation is
/// serialised because the FFTW planner is not thread-safe.
class RealFft {
 public:
  explicit RealFft(std::size_t length);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t length() const { return length_; }
  std::size_t spectrum_size() const { return length_ / 2 + 1; }

  /// Zero-pads `input` (size <= length) and writes its spectrum.
  void forward(std::span<const double> input, std::vector<std::complex<double>>& spectrum);
  /// Unnormalised inverse: output is `length` times the true inverse.
  void inverse(std::span<const std::complex<double>> spectrum, std::vector<double>& output);

 private:
  std::size_t length_;
  double* real_ = nullptr;
  void* complex_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace taumax::detail
