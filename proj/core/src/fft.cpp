#include "fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <new>

#include <fftw3.h>

#include "taumax/errors.hpp"

namespace taumax::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::size_t correlation_length(std::size_t n) {
  std::size_t len = 1;
  while (len < 2 * n) len <<= 1;
  return len;
}

RealFft::RealFft(std::size_t length) : length_(length) {
  if (length_ < 2) throw ConfigError("fft length must be at least 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(length_);
  auto* cplx = fftw_alloc_complex(spectrum_size());
  complex_ = cplx;
  if (!real_ || !cplx) {
    fftw_free(real_);
    fftw_free(cplx);
    throw std::bad_alloc();
  }
  const int n = static_cast<int>(length_);
  forward_plan_ = fftw_plan_dft_r2c_1d(n, real_, cplx, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(n, cplx, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(complex_);
}

void RealFft::forward(std::span<const double> input, std::vector<std::complex<double>>& spectrum) {
  if (input.size() > length_) throw DimensionError("fft input longer than transform length");
  std::copy(input.begin(), input.end(), real_);
  std::fill(real_ + input.size(), real_ + length_, 0.0);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  spectrum.resize(spectrum_size());
  // fftw_complex is layout-compatible with std::complex<double>.
  std::memcpy(spectrum.data(), complex_, spectrum_size() * sizeof(std::complex<double>));
}

void RealFft::inverse(std::span<const std::complex<double>> spectrum, std::vector<double>& output) {
  if (spectrum.size() != spectrum_size()) throw DimensionError("spectrum has the wrong size");
  // c2r destroys its input, so copy into the owned buffer first.
  std::memcpy(complex_, spectrum.data(), spectrum_size() * sizeof(std::complex<double>));
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  output.assign(real_, real_ + length_);
}

}  // namespace taumax::detail
