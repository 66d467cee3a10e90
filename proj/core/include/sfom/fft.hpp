#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace sfom {

/// Real-to-complex / complex-to-real transform pair of fixed length, owning its
/// FFTW plans and buffers. Forward uses exp(-i...), inverse is unnormalised.
/// Not thread-safe; give each thread its own instance.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t spectrum_size() const { return n_ / 2 + 1; }

  /// Input buffer for forward(); length size().
  std::span<double> real() { return {real_, n_}; }
  /// Output of forward(), input of inverse(); length spectrum_size().
  std::span<std::complex<double>> spectrum() { return {spectrum_, spectrum_size()}; }

  void forward();  // real() -> spectrum()
  void inverse();  // spectrum() -> real(), scaled by n

 private:
  void release();

  std::size_t n_ = 0;
  double* real_ = nullptr;
  std::complex<double>* spectrum_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

std::size_t next_pow2(std::size_t n);

}  // namespace sfom
