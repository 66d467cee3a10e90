#include "sfom/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sfom/fft.hpp"
#include "sfom/least_squares.hpp"
#include "sfom/model.hpp"

namespace sfom {

const char* to_string(Window window) { return window == Window::Hann ? "hann" : "rectangular"; }

Window parse_window(std::string_view text) {
  if (text == "hann") return Window::Hann;
  if (text == "rectangular" || text == "rect" || text == "boxcar") return Window::Rectangular;
  throw InvalidParameter("unknown window '" + std::string(text) + "'");
}

std::vector<double> make_window(Window window, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (window == Window::Hann) {
    // Periodic Hann, the variant that tiles exactly at 50% overlap.
    for (std::size_t i = 0; i < length; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(length));
    }
  }
  return w;
}

double Psd::integrated_power() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * df();
}

// ---------------------------------------------------------------- Welch

struct WelchAccumulator::Impl {
  double sample_rate;
  WelchOptions options;
  std::size_t step;
  std::vector<double> window;
  double window_power = 0.0;  // Σw²
  RealFft fft;
  std::vector<double> sum;    // Σ|X_k|² over segments
  double variance_sum = 0.0;  // Σ over segments of Σ(w x)²/Σw²
  std::size_t segments = 0;
  std::vector<double> buffer;
  std::size_t start = 0;  // offset of the next segment in buffer

  Impl(double fs, const WelchOptions& opt)
      : sample_rate(fs),
        options(opt),
        step(opt.segment_length - static_cast<std::size_t>(std::llround(opt.overlap * static_cast<double>(opt.segment_length)))),
        window(make_window(opt.window, opt.segment_length)),
        fft(opt.segment_length),
        sum(opt.segment_length / 2 + 1, 0.0) {
    for (double w : window) window_power += w * w;
  }

  void segment(const double* x) {
    const std::size_t n = options.segment_length;
    double mean = 0.0;
    if (options.detrend) {
      for (std::size_t i = 0; i < n; ++i) mean += x[i];
      mean /= static_cast<double>(n);
    }
    auto in = fft.real();
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      in[i] = window[i] * (x[i] - mean);
      energy += in[i] * in[i];
    }
    fft.forward();
    const auto spec = fft.spectrum();
    for (std::size_t k = 0; k < spec.size(); ++k) sum[k] += std::norm(spec[k]);
    variance_sum += energy / window_power;
    ++segments;
  }
};

WelchAccumulator::WelchAccumulator(double sample_rate, const WelchOptions& options) {
  if (!(sample_rate > 0.0)) throw InvalidParameter("sample rate must be positive");
  if (options.segment_length < 4) throw InvalidParameter("segment length must be >= 4");
  if (!(options.overlap >= 0.0 && options.overlap <= 0.9)) throw InvalidParameter("overlap must lie in [0, 0.9]");
  impl_ = std::make_unique<Impl>(sample_rate, options);
}

WelchAccumulator::~WelchAccumulator() = default;
WelchAccumulator::WelchAccumulator(WelchAccumulator&&) noexcept = default;
WelchAccumulator& WelchAccumulator::operator=(WelchAccumulator&&) noexcept = default;

void WelchAccumulator::push(std::span<const double> block) {
  Impl& s = *impl_;
  const std::size_t n = s.options.segment_length;
  s.buffer.insert(s.buffer.end(), block.begin(), block.end());
  while (s.buffer.size() - s.start >= n) {
    s.segment(s.buffer.data() + s.start);
    s.start += s.step;
  }
  if (s.start > 0 && s.start >= s.buffer.size() / 2) {
    s.buffer.erase(s.buffer.begin(), s.buffer.begin() + static_cast<std::ptrdiff_t>(s.start));
    s.start = 0;
  }
}

std::size_t WelchAccumulator::segments() const { return impl_->segments; }

Psd WelchAccumulator::result() const {
  const Impl& s = *impl_;
  if (s.segments == 0) {
    throw InvalidParameter("record too short: need at least segment_length = " +
                           std::to_string(s.options.segment_length) + " samples");
  }
  const std::size_t n = s.options.segment_length;
  Psd psd;
  psd.sample_rate = s.sample_rate;
  psd.window = s.options.window;
  psd.segment_count = s.segments;
  double wsum = 0.0;
  for (double w : s.window) wsum += w;
  psd.resolution_bandwidth = s.sample_rate * s.window_power / (wsum * wsum);
  psd.windowed_variance = s.variance_sum / static_cast<double>(s.segments);
  const double norm = 1.0 / (s.sample_rate * s.window_power * static_cast<double>(s.segments));
  psd.frequencies.resize(s.sum.size());
  psd.values.resize(s.sum.size());
  for (std::size_t k = 0; k < s.sum.size(); ++k) {
    psd.frequencies[k] = static_cast<double>(k) * s.sample_rate / static_cast<double>(n);
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    psd.values[k] = (edge ? 1.0 : 2.0) * s.sum[k] * norm;
  }
  return psd;
}

Psd welch_psd(std::span<const double> samples, double sample_rate, const WelchOptions& options) {
  if (samples.size() < options.segment_length) {
    throw InvalidParameter("record of " + std::to_string(samples.size()) +
                           " samples is shorter than the minimum length segment_length = " +
                           std::to_string(options.segment_length));
  }
  WelchAccumulator acc(sample_rate, options);
  acc.push(samples);
  return acc.result();
}

// ---------------------------------------------------------------- mode fit

double SpectrumFit::evaluate(double f) const {
  const double d = f_m * f_m - f * f;
  return floor + amplitude / (d * d + f * f * gamma * gamma);
}

double lorentzian_area(double amplitude, double f_m, double gamma) {
  return amplitude * std::numbers::pi / (2.0 * gamma * f_m * f_m);
}

double thermal_psd_amplitude(double gamma_hz, double m_eff, double temperature) {
  const double two_pi = constants::two_pi;
  return 4.0 * two_pi * gamma_hz * constants::k_B * temperature / (m_eff * std::pow(two_pi, 4));
}

namespace {

// Normalised parameters: [ (f_m − f_ref)/df, ln(gamma/df), ln(peak height), floor ].
struct ModeModel {
  double f_ref;
  double df;

  double f_m(std::span<const double> p) const { return f_ref + p[0] * df; }
  double gamma(std::span<const double> p) const { return std::exp(p[1]) * df; }
  double eval(std::span<const double> p, double f) const {
    const double fm = f_m(p);
    const double g = gamma(p);
    const double d = fm * fm - f * f;
    return p[3] + std::exp(p[2]) * fm * fm * g * g / (d * d + f * f * g * g);
  }
};

}  // namespace

SpectrumFit fit_mode(const Psd& psd, Band band, const FitModeOptions& options) {
  std::vector<double> f, y;
  for (std::size_t k = 0; k < psd.frequencies.size(); ++k) {
    if (band.contains(psd.frequencies[k])) {
      f.push_back(psd.frequencies[k]);
      y.push_back(psd.values[k]);
    }
  }
  const std::size_t n = f.size();
  if (n < 20) {
    throw FitError(FitError::Kind::BadInput, "band holds " + std::to_string(n) + " bins; need at least 20");
  }
  const double scale = *std::max_element(y.begin(), y.end());
  if (!(scale > 0.0) || !std::isfinite(scale)) throw FitError(FitError::Kind::NoPeak, "band PSD is zero");
  for (double& v : y) v /= scale;

  const double df = psd.df();
  const auto peak_it = std::max_element(y.begin(), y.end());
  const auto peak_idx = static_cast<std::size_t>(peak_it - y.begin());
  std::vector<double> sorted = y;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  const double floor0 = sorted[n / 2];
  const double height0 = *peak_it - floor0;
  if (!(height0 > 0.0)) throw FitError(FitError::Kind::NoPeak, "no peak above the floor in band");
  std::size_t left = peak_idx, right = peak_idx;
  while (left > 0 && y[left - 1] > floor0 + 0.5 * height0) --left;
  while (right + 1 < n && y[right + 1] > floor0 + 0.5 * height0) ++right;
  const double gamma0 = std::max(static_cast<double>(right - left), 1.0) * df;

  const ModeModel model{f[peak_idx], df};
  const double segs = static_cast<double>(std::max<std::size_t>(psd.segment_count, 1));

  // First-pass sigmas from a moving average of the data itself.
  std::vector<double> sigma(n);
  const std::size_t half = options.smoothing_bins / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i >= half ? i - half : 0;
    const std::size_t b = std::min(n - 1, i + half);
    double s = 0.0;
    for (std::size_t j = a; j <= b; ++j) s += y[j];
    sigma[i] = s / static_cast<double>(b - a + 1) / std::sqrt(segs);
  }
  const double sigma_floor = 1e-12 * *std::max_element(sigma.begin(), sigma.end());
  for (double& s : sigma) s = std::max(s, sigma_floor);

  const ResidualFn fn = [&](std::span<const double> p, std::span<double> r) {
    for (std::size_t i = 0; i < n; ++i) r[i] = (model.eval(p, f[i]) - y[i]) / sigma[i];
  };
  LeastSquaresOptions lm;
  lm.max_iterations = options.max_iterations;
  lm.fd_absolute_step = {1e-6, 1e-7, 1e-7, 1e-9};
  std::vector<double> p0{0.0, std::log(gamma0 / df), std::log(height0), floor0};
  auto result = levenberg_marquardt(fn, n, p0, lm);

  // Second pass: weights from the first-pass model, which removes the bias of
  // data-derived weights.
  if (std::isfinite(result.cost)) {
    for (std::size_t i = 0; i < n; ++i) {
      sigma[i] = std::max(std::abs(model.eval(result.params, f[i])) / std::sqrt(segs), sigma_floor);
    }
    result = levenberg_marquardt(fn, n, result.params, lm);
  }
  const auto& p = result.params;
  if (!result.converged || !std::isfinite(result.cost)) {
    throw FitError(FitError::Kind::NonConvergence, "mode fit: " + result.message,
                   {model.f_m(p), model.gamma(p), std::exp(p[2]) * scale, p[3] * scale});
  }

  SpectrumFit fit;
  fit.f_m = model.f_m(p);
  fit.gamma = model.gamma(p);
  const double height = std::exp(p[2]) * scale;
  fit.amplitude = height * fit.f_m * fit.f_m * fit.gamma * fit.gamma;
  fit.floor = p[3] * scale;
  fit.area = lorentzian_area(fit.amplitude, fit.f_m, fit.gamma);
  fit.points = n;
  fit.iterations = result.iterations;
  const double dof = static_cast<double>(n) - 4.0;
  fit.reduced_chi2 = 2.0 * result.cost / dof;

  const std::vector<double> payload{fit.f_m, fit.gamma, fit.amplitude, fit.floor};
  if (fit.gamma > band.width() || fit.gamma < 1e-3 * df) {
    throw FitError(FitError::Kind::Bounds, "fitted linewidth outside [1e-3 bin, band width]", payload);
  }
  if (!band.contains(fit.f_m)) throw FitError(FitError::Kind::NoPeak, "fitted centre left the band", payload);

  const std::size_t np = 4;
  if (result.covariance.size() == np * np) {
    const auto cov = [&](std::size_t i, std::size_t j) { return result.covariance[i * np + j]; };
    const double s2 = fit.reduced_chi2;
    fit.f_m_err = df * std::sqrt(s2 * cov(0, 0));
    fit.gamma_err = fit.gamma * std::sqrt(s2 * cov(1, 1));
    fit.floor_err = scale * std::sqrt(s2 * cov(3, 3));
    // ln c = ln h + 2 ln f_m + 2 ln γ; ln area = ln h + ln γ (f_m terms cancel).
    const double var_lnc = s2 * (cov(2, 2) + 4.0 * cov(1, 1) + 4.0 * cov(1, 2)) +
                           std::pow(2.0 * fit.f_m_err / fit.f_m, 2);
    fit.amplitude_err = fit.amplitude * std::sqrt(std::max(0.0, var_lnc));
    fit.area_err = fit.area * std::sqrt(std::max(0.0, s2 * (cov(2, 2) + cov(1, 1) + 2.0 * cov(1, 2))));
    const double significance = 1.0 / std::sqrt(std::max(s2 * cov(2, 2), 1e-300));
    if (significance < options.min_significance) {
      throw FitError(FitError::Kind::NoPeak, "peak amplitude not significant", payload);
    }
  } else {
    throw FitError(FitError::Kind::NoPeak, "peak parameters not identifiable", payload);
  }
  return fit;
}

}  // namespace sfom
