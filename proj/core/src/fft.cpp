#include "sfom/fft.hpp"

#include <fftw3.h>

#include <new>
#include <stdexcept>
#include <utility>

namespace sfom {

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw std::invalid_argument("FFT length must be >= 2");
  real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n_));
  spectrum_ = static_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * spectrum_size()));
  if (real_ == nullptr || spectrum_ == nullptr) {
    release();
    throw std::bad_alloc();
  }
  const int len = static_cast<int>(n_);
  auto* spec = reinterpret_cast<fftw_complex*>(spectrum_);
  forward_plan_ = fftw_plan_dft_r2c_1d(len, real_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(len, spec, real_, FFTW_ESTIMATE);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    release();
    throw std::runtime_error("FFTW plan creation failed");
  }
}

RealFft::~RealFft() { release(); }

RealFft::RealFft(RealFft&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      real_(std::exchange(other.real_, nullptr)),
      spectrum_(std::exchange(other.spectrum_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
  if (this != &other) {
    release();
    n_ = std::exchange(other.n_, 0);
    real_ = std::exchange(other.real_, nullptr);
    spectrum_ = std::exchange(other.spectrum_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void RealFft::release() {
  if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  if (real_ != nullptr) fftw_free(real_);
  if (spectrum_ != nullptr) fftw_free(spectrum_);
  forward_plan_ = inverse_plan_ = nullptr;
  real_ = nullptr;
  spectrum_ = nullptr;
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void RealFft::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace sfom
