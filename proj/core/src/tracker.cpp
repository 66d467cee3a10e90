#include "sfom/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "sfom/fft.hpp"
#include "sfom/model.hpp"
#include "sfom/random.hpp"

namespace sfom {

namespace {

constexpr std::uint64_t kMeasurementStream = 3;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double WienerFilter::response(double f) const {
  const double w = kTwoPi * f / sample_rate;
  double acc = taps[half_length];
  for (std::size_t o = 1; o <= half_length; ++o) acc += 2.0 * taps[half_length + o] * std::cos(w * static_cast<double>(o));
  return acc;
}

WienerFilter design_zero_phase(std::vector<double> frequencies, std::vector<double> gain, double sample_rate,
                               const FirDesignOptions& options) {
  if (gain.size() < 3 || gain.size() != frequencies.size()) throw InvalidParameter("design grid too small");
  const std::size_t n = 2 * (gain.size() - 1);
  RealFft fft(n);
  auto spec = fft.spectrum();
  for (std::size_t k = 0; k < gain.size(); ++k) spec[k] = gain[k];
  fft.inverse();
  const std::vector<double> impulse(fft.real().begin(), fft.real().end());  // scaled by n

  const double peak = *std::max_element(gain.begin(), gain.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  WienerFilter filter;
  filter.sample_rate = sample_rate;
  std::size_t half = std::max<std::size_t>(options.initial_half_length, 1);
  while (true) {
    half = std::min(half, n / 2 - 1);
    std::vector<double> taps(2 * half + 1);
    for (std::size_t o = 0; o <= half; ++o) {
      const double taper = 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(o) / static_cast<double>(half + 1)));
      const double v = impulse[o] / static_cast<double>(n) * taper;
      taps[half + o] = v;
      taps[half - o] = v;
    }
    // Realised response on the design grid.
    auto in = fft.real();
    std::fill(in.begin(), in.end(), 0.0);
    in[0] = taps[half];
    for (std::size_t o = 1; o <= half; ++o) {
      in[o] = taps[half + o];
      in[n - o] = taps[half - o];
    }
    fft.forward();
    double err = 0.0;
    for (std::size_t k = 0; k < gain.size(); ++k) err = std::max(err, std::abs(fft.spectrum()[k].real() - gain[k]));
    const double ripple = std::abs(peak) > 0.0 ? err / std::abs(peak) : 0.0;
    if (ripple <= options.max_ripple || half >= n / 2 - 1) {
      if (ripple > options.max_ripple) {
        throw InvalidParameter("FIR ripple " + std::to_string(ripple) + " exceeds bound; refine the design grid");
      }
      filter.taps = std::move(taps);
      filter.half_length = half;
      filter.ripple = ripple;
      break;
    }
    half *= 2;
  }
  filter.frequencies = std::move(frequencies);
  filter.gain = std::move(gain);
  return filter;
}

WienerFilter design_wiener(const Psd& signal_psd, const Psd& noise_psd, const FirDesignOptions& options) {
  if (signal_psd.frequencies != noise_psd.frequencies) throw InvalidParameter("signal and noise PSD grids differ");
  const std::size_t n = signal_psd.values.size();
  if (n < 3 || signal_psd.frequencies.front() != 0.0) throw InvalidParameter("PSD grid must start at 0 Hz");
  std::vector<double> gain(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = signal_psd.values[k];
    const double nn = noise_psd.values[k];
    if (!(nn > 0.0) || !std::isfinite(nn)) throw InvalidParameter("noise PSD must be positive everywhere");
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidParameter("signal PSD must be finite and >= 0");
    gain[k] = s / (s + nn);
  }
  const double fs = signal_psd.sample_rate > 0.0 ? signal_psd.sample_rate : 2.0 * signal_psd.frequencies.back();
  return design_zero_phase(signal_psd.frequencies, std::move(gain), fs, options);
}

Psd psd_on_grid(double sample_rate, std::size_t n, const std::function<double(double)>& model) {
  Psd psd;
  psd.sample_rate = sample_rate;
  psd.segment_count = 1;
  psd.window = Window::Rectangular;
  psd.resolution_bandwidth = sample_rate / static_cast<double>(n);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n);
    psd.frequencies.push_back(f);
    psd.values.push_back(model(f));
  }
  return psd;
}

WienerFilter design_lowpass(double sample_rate, double corner_hz, const FirDesignOptions& options) {
  if (!(corner_hz > 0.0) || !(corner_hz < 0.5 * sample_rate)) throw InvalidParameter("low-pass corner must lie in (0, f_s/2)");
  const auto n = next_pow2(static_cast<std::size_t>(std::ceil(64.0 * sample_rate / corner_hz)));
  const Psd grid = psd_on_grid(sample_rate, n, [corner_hz](double f) {
    const double r = f / corner_hz;
    return 1.0 / std::sqrt(1.0 + r * r * r * r * r * r * r * r);
  });
  FirDesignOptions opt = options;
  opt.initial_half_length = std::max<std::size_t>(opt.initial_half_length,
                                                  static_cast<std::size_t>(sample_rate / corner_hz));
  return design_zero_phase(grid.frequencies, grid.values, sample_rate, opt);
}

// ---------------------------------------------------------------- demodulator

struct Demodulator::Impl {
  double fs;
  DemodSettings settings;
  std::vector<double> lp;  // low-pass taps, symmetric
  std::size_t lp_half;
  std::size_t wiener_half;
  std::size_t wiener_len;
  std::size_t block;  // FFT size
  std::size_t hop;
  RealFft conv;
  std::vector<std::complex<double>> wiener_spectrum;
  std::vector<double> in_buf;
  std::size_t total_in = 0;
  std::size_t next_y = 0;  // global index of the next overlap-save output
  std::vector<double> mix_c, mix_s;
  std::size_t mix_base;      // filtered index of mix_c[0]
  std::size_t next_center;   // filtered index of the next output point
  std::size_t bin_samples;
  double gain = 1.0;
  std::complex<double> phasor{1.0, 0.0};
  std::complex<double> rotation;

  Impl(double sample_rate, const WienerFilter& filter, const DemodSettings& s, std::vector<double> lp_taps)
      : fs(sample_rate),
        settings(s),
        lp(std::move(lp_taps)),
        lp_half(lp.size() / 2),
        wiener_half(filter.half_length),
        wiener_len(filter.taps.size()),
        block(next_pow2(std::max<std::size_t>(4 * filter.taps.size(), 1 << 12))),
        hop(block - filter.taps.size() + 1),
        conv(block),
        next_y(filter.taps.size() - 1),
        mix_base(filter.half_length),
        next_center(filter.half_length + lp.size() / 2),
        bin_samples(static_cast<std::size_t>(std::llround(s.bin_time * sample_rate))) {
    auto in = conv.real();
    std::fill(in.begin(), in.end(), 0.0);
    std::copy(filter.taps.begin(), filter.taps.end(), in.begin());
    conv.forward();
    wiener_spectrum.assign(conv.spectrum().begin(), conv.spectrum().end());
    const double step = kTwoPi * settings.f_m / fs;
    rotation = {std::cos(step), std::sin(step)};
  }

  std::size_t samples_for(std::size_t points) const {
    return points == 0 ? 0 : 2 * wiener_half + 2 * lp_half + (points - 1) * bin_samples + 1;
  }

  std::complex<double> mixer(std::size_t i) {
    // Exact phase every 4096 samples, rotation in between.
    if (i % 4096 == 0 || i == mix_base) {
      const double cycles = std::fmod(settings.f_m * static_cast<double>(i), fs) / fs;
      phasor = {std::cos(kTwoPi * cycles), std::sin(kTwoPi * cycles)};
    }
    const auto out = phasor;
    phasor *= rotation;
    return out;
  }

  void emit(std::vector<QuadraturePoint>& out) {
    const std::size_t available = mix_base + mix_c.size();
    while (next_center + lp_half < available) {
      const std::size_t first = next_center - lp_half - mix_base;
      double xs = 0.0, ys = 0.0;
      for (std::size_t k = 0; k < lp.size(); ++k) {
        xs += lp[k] * mix_c[first + k];
        ys += lp[k] * mix_s[first + k];
      }
      out.push_back({static_cast<double>(next_center) / fs, xs / gain, ys / gain});
      next_center += bin_samples;
    }
    // Drop mixed samples no future point needs.
    const std::size_t keep_from = next_center - lp_half;
    if (keep_from > mix_base && keep_from - mix_base > mix_c.size() / 2) {
      const auto drop = static_cast<std::ptrdiff_t>(std::min(keep_from - mix_base, mix_c.size()));
      mix_c.erase(mix_c.begin(), mix_c.begin() + drop);
      mix_s.erase(mix_s.begin(), mix_s.begin() + drop);
      mix_base += static_cast<std::size_t>(drop);
    }
  }

  // One overlap-save block over in_buf[0, block); outputs with global index < limit.
  void run_block(std::size_t limit, std::vector<QuadraturePoint>& out) {
    auto in = conv.real();
    std::copy(in_buf.begin(), in_buf.begin() + static_cast<std::ptrdiff_t>(block), in.begin());
    conv.forward();
    auto spec = conv.spectrum();
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= wiener_spectrum[k];
    conv.inverse();
    const double scale = 1.0 / static_cast<double>(block);
    for (std::size_t j = wiener_len - 1; j < block && next_y < limit; ++j, ++next_y) {
      const double w = in[j] * scale;
      const auto m = mixer(next_y - wiener_half);
      mix_c.push_back(2.0 * w * m.real());
      mix_s.push_back(2.0 * w * m.imag());
    }
    in_buf.erase(in_buf.begin(), in_buf.begin() + static_cast<std::ptrdiff_t>(hop));
    emit(out);
  }

  void push(std::span<const double> data, std::vector<QuadraturePoint>& out) {
    in_buf.insert(in_buf.end(), data.begin(), data.end());
    total_in += data.size();
    while (in_buf.size() >= block) run_block(std::numeric_limits<std::size_t>::max(), out);
  }

  void finish(std::vector<QuadraturePoint>& out) {
    while (next_y < total_in) {
      in_buf.resize(std::max(in_buf.size(), block), 0.0);
      run_block(total_in, out);
    }
  }
};

Demodulator::Demodulator(double sample_rate, const WienerFilter& filter, const DemodSettings& settings) {
  if (!(sample_rate > 0.0)) throw InvalidParameter("sample rate must be positive");
  if (!(settings.f_m > 0.0 && settings.f_m < 0.5 * sample_rate)) throw InvalidParameter("f_m must lie in (0, f_s/2)");
  if (!(settings.lp_bandwidth > 0.0)) throw InvalidParameter("low-pass bandwidth must be positive");
  if (!(settings.bin_time * settings.lp_bandwidth >= 1.0 - 1e-9)) {
    throw InvalidParameter("bin time " + std::to_string(settings.bin_time) + " s is shorter than 1/lp_bandwidth");
  }
  if (filter.taps.empty() || filter.taps.size() % 2 == 0) throw InvalidParameter("filter taps must be odd-length");
  auto lp = design_lowpass(sample_rate, settings.lp_bandwidth).taps;

  // Pipeline gain from a unit tone at f_m through an uncalibrated copy.
  Impl probe(sample_rate, filter, settings, lp);
  std::vector<QuadraturePoint> pts;
  const std::size_t need = probe.samples_for(3);
  std::vector<double> tone(need);
  for (std::size_t i = 0; i < need; ++i) {
    tone[i] = std::cos(kTwoPi * std::fmod(settings.f_m * static_cast<double>(i), sample_rate) / sample_rate);
  }
  probe.push(tone, pts);
  probe.finish(pts);
  if (pts.empty()) throw InvalidParameter("calibration tone too short");
  double g = 0.0;
  for (const auto& p : pts) g += std::hypot(p.x, p.y);
  g /= static_cast<double>(pts.size());
  if (!(g > 0.0)) throw InvalidParameter("pipeline has zero gain at f_m");

  impl_ = std::make_unique<Impl>(sample_rate, filter, settings, std::move(lp));
  impl_->gain = g;
}

Demodulator::~Demodulator() = default;
Demodulator::Demodulator(Demodulator&&) noexcept = default;
Demodulator& Demodulator::operator=(Demodulator&&) noexcept = default;

void Demodulator::push(std::span<const double> block, std::vector<QuadraturePoint>& out) { impl_->push(block, out); }
void Demodulator::finish(std::vector<QuadraturePoint>& out) { impl_->finish(out); }
double Demodulator::gain() const { return impl_->gain; }

std::size_t Demodulator::samples_for(std::size_t points) const {
  return impl_->samples_for(points);
}

// ---------------------------------------------------------------- tracks

namespace {

double pooled_std(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (x[i] - mx) + (y[i] - my) * (y[i] - my);
  return std::sqrt(s / (2.0 * (n - 1.0)));
}

}  // namespace

double measurement_std(double sample_rate, const WienerFilter& filter, const DemodSettings& settings,
                       const MeasurementNoise& noise) {
  if (!(noise.shot_noise_floor > 0.0)) return 0.0;
  if (noise.points < 2) throw InvalidParameter("need at least 2 noise points");
  Demodulator demod(sample_rate, filter, settings);
  NormalStream rng(noise.seed, kMeasurementStream);
  const double sigma = std::sqrt(noise.shot_noise_floor * sample_rate);
  const std::size_t total = demod.samples_for(noise.points);
  std::vector<QuadraturePoint> pts;
  std::vector<double> block(1 << 16);
  for (std::size_t done = 0; done < total; done += block.size()) {
    block.resize(std::min(block.size(), total - done));
    for (double& v : block) v = sigma * rng();
    demod.push(block, pts);
  }
  demod.finish(pts);
  if (pts.size() < 2) throw InvalidParameter("measurement-noise record produced too few points");
  std::vector<double> x, y;
  for (const auto& p : pts) {
    x.push_back(p.x);
    y.push_back(p.y);
  }
  return pooled_std(x, y);
}

PhaseSpaceTrack make_track(std::span<const QuadraturePoint> points, double bin_time, double meas_std) {
  PhaseSpaceTrack track;
  track.bin_time = bin_time;
  track.measurement_std = meas_std;
  for (const auto& p : points) {
    track.times.push_back(p.t);
    track.x.push_back(p.x);
    track.y.push_back(p.y);
  }
  if (points.size() >= 2) track.thermal_std = pooled_std(track.x, track.y);
  return track;
}

PhaseSpaceTrack demodulate(std::span<const double> record, double sample_rate, const WienerFilter& filter,
                           const DemodSettings& settings, const MeasurementNoise& noise) {
  Demodulator demod(sample_rate, filter, settings);
  std::vector<QuadraturePoint> pts;
  demod.push(record, pts);
  demod.finish(pts);
  return make_track(pts, settings.bin_time, measurement_std(sample_rate, filter, settings, noise));
}

TrackStatistics track_statistics(const PhaseSpaceTrack& track, std::size_t radial_bins) {
  const std::size_t n = track.size();
  if (n < 500) throw InvalidParameter("track statistics need at least 500 points, got " + std::to_string(n));
  if (radial_bins == 0) throw InvalidParameter("need at least one radial bin");
  TrackStatistics st;
  st.points = n;
  const auto nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.mean_x += track.x[i];
    st.mean_y += track.y[i];
  }
  st.mean_x /= nd;
  st.mean_y /= nd;
  double m4x = 0.0, m4y = 0.0, rmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = track.x[i] - st.mean_x;
    const double dy = track.y[i] - st.mean_y;
    st.cov_xx += dx * dx;
    st.cov_yy += dy * dy;
    st.cov_xy += dx * dy;
    m4x += dx * dx * dx * dx;
    m4y += dy * dy * dy * dy;
    rmax = std::max(rmax, std::hypot(dx, dy));
  }
  const double m2x = st.cov_xx / nd, m2y = st.cov_yy / nd;
  st.kurtosis_x = m2x > 0.0 ? (m4x / nd) / (m2x * m2x) - 3.0 : 0.0;
  st.kurtosis_y = m2y > 0.0 ? (m4y / nd) / (m2y * m2y) - 3.0 : 0.0;
  st.kurtosis_se = std::sqrt(24.0 / nd);
  st.cov_xx /= nd - 1.0;
  st.cov_yy /= nd - 1.0;
  st.cov_xy /= nd - 1.0;

  const double width = rmax > 0.0 ? rmax / static_cast<double>(radial_bins) : 1.0;
  st.radial_counts.assign(radial_bins, 0);
  for (std::size_t b = 0; b <= radial_bins; ++b) st.radial_edges.push_back(width * static_cast<double>(b));
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::hypot(track.x[i] - st.mean_x, track.y[i] - st.mean_y);
    const auto b = std::min(radial_bins - 1, static_cast<std::size_t>(r / width));
    ++st.radial_counts[b];
  }
  return st;
}

double decorrelation_time(std::span<const double> series, double dt) {
  const std::size_t n = series.size();
  if (n < 8) throw InvalidParameter("series too short for an autocorrelation");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  const auto acov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (series[i] - mean) * (series[i + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double c0 = acov(0);
  if (!(c0 > 0.0)) throw InvalidParameter("constant series has no decorrelation time");
  double num = 0.0, den = 0.0;
  for (std::size_t lag = 1; lag < n / 4; ++lag) {
    const double rho = acov(lag) / c0;
    if (!(rho > 0.1)) break;
    const double k = static_cast<double>(lag);
    num += k * k;
    den -= k * std::log(rho);
  }
  if (!(den > 0.0)) throw InvalidParameter("autocorrelation falls below 0.1 within one lag");
  return dt * num / den;
}

}  // namespace sfom
