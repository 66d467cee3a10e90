#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sfom/config.hpp"
#include "sfom/fft.hpp"
#include "sfom/model.hpp"
#include "sfom/spectral.hpp"

namespace sfom {

namespace {

struct DurationState {
  double duration;
  std::size_t chunk;  // samples per chunk
  std::size_t half_smooth;
  RealFft fft;
  std::size_t lo_bin, hi_bin;  // accumulated bin range [lo_bin, hi_bin)
  std::vector<double> sum;
  std::vector<double> pending;
  std::size_t chunks = 0;

  DurationState(double d, double fs, const SnrOptions& opt)
      : duration(d),
        chunk(static_cast<std::size_t>(std::llround(d * fs))),
        fft(next_pow2(2 * std::max<std::size_t>(chunk, 2))) {
    const double bin = fs / static_cast<double>(fft.size());
    // Moving average over the 1/d resolution bandwidth.
    half_smooth = static_cast<std::size_t>(std::llround(0.5 * static_cast<double>(fft.size()) / static_cast<double>(chunk)));
    const double f_lo = std::min(opt.peak.lo, opt.floor.lo);
    const double f_hi = std::max(opt.peak.hi, opt.floor.hi);
    const auto last = static_cast<long long>(fft.spectrum_size()) - 1;
    lo_bin = static_cast<std::size_t>(std::clamp<long long>(
        static_cast<long long>(std::floor(f_lo / bin)) - static_cast<long long>(half_smooth), 0, last));
    hi_bin = static_cast<std::size_t>(std::clamp<long long>(
        static_cast<long long>(std::ceil(f_hi / bin)) + static_cast<long long>(half_smooth) + 1, 0, last + 1));
    sum.assign(hi_bin - lo_bin, 0.0);
    pending.reserve(chunk);
  }

  void process(double fs) {
    double mean = 0.0;
    for (double v : pending) mean += v;
    mean /= static_cast<double>(chunk);
    auto in = fft.real();
    std::fill(in.begin(), in.end(), 0.0);
    for (std::size_t i = 0; i < chunk; ++i) in[i] = pending[i] - mean;
    fft.forward();
    const auto spec = fft.spectrum();
    const double norm = 2.0 / (fs * static_cast<double>(chunk));
    for (std::size_t k = lo_bin; k < hi_bin; ++k) sum[k - lo_bin] += norm * std::norm(spec[k]);
    ++chunks;
    pending.clear();
  }

  SnrPoint result(double fs, const SnrOptions& opt) const {
    if (chunks == 0) {
      throw InvalidParameter("duration " + format_double(duration) + " s exceeds the record");
    }
    const double bin = fs / static_cast<double>(fft.size());
    const auto smoothed = [&](std::size_t k) {
      const std::size_t a = std::max(k, lo_bin + half_smooth) - half_smooth;
      const std::size_t b = std::min(k + half_smooth, hi_bin - 1);
      double s = 0.0;
      for (std::size_t j = a; j <= b; ++j) s += sum[j - lo_bin];
      return s / static_cast<double>((b - a + 1) * chunks);
    };
    double peak = -std::numeric_limits<double>::infinity();
    double floor_sum = 0.0;
    std::size_t floor_bins = 0;
    for (std::size_t k = lo_bin; k < hi_bin; ++k) {
      const double f = static_cast<double>(k) * bin;
      if (opt.peak.contains(f)) peak = std::max(peak, smoothed(k));
      if (opt.floor.contains(f)) {
        floor_sum += smoothed(k);
        ++floor_bins;
      }
    }
    if (floor_bins == 0 || !std::isfinite(peak)) {
      throw InvalidParameter("peak or floor band holds no frequency bins");
    }
    const double floor = floor_sum / static_cast<double>(floor_bins);
    const double excess = (peak - floor) / floor;
    const double db = excess > 0.0 ? 10.0 * std::log10(excess) : -std::numeric_limits<double>::infinity();
    return {duration, db, chunks};
  }
};

void check_options(double fs, std::span<const double> durations, const SnrOptions& opt) {
  if (!(fs > 0.0)) throw InvalidParameter("sample rate must be positive");
  if (!(opt.f_m > 0.0)) throw InvalidParameter("f_m must be positive");
  if (!(opt.peak.hi > opt.peak.lo) || !(opt.floor.hi > opt.floor.lo)) throw InvalidParameter("empty band");
  for (double d : durations) {
    if (!(d * opt.f_m >= 10.0)) {
      throw InvalidParameter("duration " + format_double(d) + " s is shorter than 10 cycles of f_m");
    }
  }
}

}  // namespace

double finite_time_snr_factor(double gamma_hz, double duration) {
  const double a = std::numbers::pi * gamma_hz * duration;
  if (a < 1e-6) return 0.5 * a;
  return 1.0 - (1.0 - std::exp(-a)) / a;
}

struct SnrAccumulator::Impl {
  double sample_rate;
  SnrOptions options;
  std::vector<DurationState> states;
};

SnrAccumulator::SnrAccumulator(double sample_rate, std::span<const double> durations, const SnrOptions& options) {
  check_options(sample_rate, durations, options);
  impl_ = std::make_unique<Impl>(Impl{sample_rate, options, {}});
  impl_->states.reserve(durations.size());
  for (double d : durations) impl_->states.emplace_back(d, sample_rate, options);
}

SnrAccumulator::~SnrAccumulator() = default;
SnrAccumulator::SnrAccumulator(SnrAccumulator&&) noexcept = default;
SnrAccumulator& SnrAccumulator::operator=(SnrAccumulator&&) noexcept = default;

void SnrAccumulator::push(std::span<const double> block) {
  Impl& s = *impl_;
  for (auto& st : s.states) {
    std::size_t pos = 0;
    while (pos < block.size()) {
      if (s.options.max_chunks != 0 && st.chunks >= s.options.max_chunks) break;
      const std::size_t take = std::min(st.chunk - st.pending.size(), block.size() - pos);
      st.pending.insert(st.pending.end(), block.begin() + static_cast<std::ptrdiff_t>(pos),
                        block.begin() + static_cast<std::ptrdiff_t>(pos + take));
      pos += take;
      if (st.pending.size() == st.chunk) st.process(s.sample_rate);
    }
  }
}

std::vector<SnrPoint> SnrAccumulator::result() const {
  std::vector<SnrPoint> out;
  for (const auto& st : impl_->states) out.push_back(st.result(impl_->sample_rate, impl_->options));
  return out;
}

std::vector<SnrPoint> snr_vs_time(std::span<const double> record, double sample_rate,
                                  std::span<const double> durations, const SnrOptions& options) {
  const double total = static_cast<double>(record.size()) / sample_rate;
  for (double d : durations) {
    if (std::llround(d * sample_rate) > static_cast<long long>(record.size())) {
      throw InvalidParameter("duration " + format_double(d) + " s exceeds the record length " +
                             format_double(total) + " s");
    }
  }
  SnrAccumulator acc(sample_rate, durations, options);
  acc.push(record);
  return acc.result();
}

}  // namespace sfom
