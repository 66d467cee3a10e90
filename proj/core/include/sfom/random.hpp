#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace sfom {

/// Standard normal variates from a seeded 64-bit Mersenne Twister. Each
/// (seed, stream) pair gives an independent sequence. The engine is seeded
/// through std::seed_seq and the Marsaglia polar transform is done here rather
/// than by std::normal_distribution, whose algorithm varies between standard
/// libraries.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  double operator()();
  void fill(std::span<double> out);

 private:
  double uniform_signed();  // [-1, 1)

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sfom
