#include "sfom/random.hpp"

#include <cmath>

namespace sfom {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream) : engine_(make_engine(seed, stream)) {}

double NormalStream::uniform_signed() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-52 - 1.0;
}

double NormalStream::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0, v = 0.0, r2 = 0.0;
  do {
    u = uniform_signed();
    v = uniform_signed();
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

void NormalStream::fill(std::span<double> out) {
  for (double& v : out) v = (*this)();
}

}  // namespace sfom
