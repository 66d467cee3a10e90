#pragma once

// Power spectral density estimation and single-resonance fitting.
//
// PSDs are single-sided in Hz: for a real record, integrating `values` over
// [0, f_s/2] gives the variance. A double-sided density S_dd(f) defined on
// (−f_s/2, f_s/2) maps to 2·S_dd(f) here.

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace sfom {

enum class Window { Hann, Rectangular };

const char* to_string(Window window);
Window parse_window(std::string_view text);
std::vector<double> make_window(Window window, std::size_t length);

struct Psd {
  std::vector<double> frequencies;  // Hz, uniform from 0
  std::vector<double> values;       // single-sided, units²/Hz
  std::size_t segment_count = 0;
  Window window = Window::Hann;
  double resolution_bandwidth = 0.0;  // equivalent noise bandwidth, Hz
  double sample_rate = 0.0;
  /// Mean over segments of Σ(w·x)²/Σw², the quantity Σ values·df must equal.
  double windowed_variance = 0.0;

  double df() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
  /// Σ values · df.
  double integrated_power() const;
};

struct WelchOptions {
  std::size_t segment_length = 4096;
  double overlap = 0.5;  // fraction in [0, 0.9]
  Window window = Window::Hann;
  /// Subtract each segment's mean before windowing.
  bool detrend = true;
};

Psd welch_psd(std::span<const double> samples, double sample_rate, const WelchOptions& options = {});

/// Welch estimate over a record delivered in arbitrary blocks. Identical to
/// welch_psd on the concatenated record.
class WelchAccumulator {
 public:
  WelchAccumulator(double sample_rate, const WelchOptions& options);
  ~WelchAccumulator();
  WelchAccumulator(WelchAccumulator&&) noexcept;
  WelchAccumulator& operator=(WelchAccumulator&&) noexcept;

  void push(std::span<const double> block);
  std::size_t segments() const;
  /// Throws InvalidParameter when no full segment has been seen.
  Psd result() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct Band {
  double lo = 0.0;  // Hz
  double hi = 0.0;

  bool contains(double f) const { return f >= lo && f <= hi; }
  double width() const { return hi - lo; }
};

/// S(f) = floor + c/((f_m² − f²)² + f²·gamma²); gamma is the FWHM in Hz.
struct SpectrumFit {
  double f_m = 0.0;
  double gamma = 0.0;
  double amplitude = 0.0;  // c, units²·Hz³
  double floor = 0.0;
  /// ∫₀^∞ of the resonant term: c·π/(2·gamma·f_m²). The variance of the mode.
  double area = 0.0;
  double f_m_err = 0.0;
  double gamma_err = 0.0;
  double amplitude_err = 0.0;
  double floor_err = 0.0;
  double area_err = 0.0;
  double reduced_chi2 = 0.0;
  std::size_t points = 0;
  int iterations = 0;

  double evaluate(double f) const;
  double peak_value() const { return amplitude / (f_m * f_m * gamma * gamma); }
};

double lorentzian_area(double amplitude, double f_m, double gamma);

/// Resonant amplitude c of the single-sided thermal displacement PSD of a mode
/// with linewidth gamma_hz: S_x(f) = c/((f_m² − f²)² + f²γ²), c = 4·(2πγ)k_B·T/(m·(2π)⁴).
double thermal_psd_amplitude(double gamma_hz, double m_eff, double temperature);

struct FitModeOptions {
  int max_iterations = 200;
  /// Bins in the moving average used for the first-pass weights.
  std::size_t smoothing_bins = 9;
  /// Peak amplitude must exceed this many standard errors.
  double min_significance = 5.0;
};

/// Weighted least squares over (f_m, gamma, c, floor) on the bins inside
/// `band`. First pass weights are the inverse locally smoothed PSD; the fit is
/// then repeated with weights from the first-pass model. Throws FitError
/// (BadInput, NoPeak, Bounds, NonConvergence).
SpectrumFit fit_mode(const Psd& psd, Band band, const FitModeOptions& options = {});

struct SnrOptions {
  Band peak;
  Band floor;
  double f_m = 0.0;  // Hz, used for the minimum-duration check
  /// Cap on the number of chunks averaged per duration (0 = all that fit).
  std::size_t max_chunks = 0;
};

struct SnrPoint {
  double duration = 0.0;  // s
  double snr_db = 0.0;
  std::size_t chunks = 0;
};

/// For each duration d the record is cut into consecutive chunks of length d;
/// each chunk gives a rectangular-window periodogram (zero padded at least 2×)
/// smoothed over the 1/d resolution bandwidth. With P the maximum smoothed PSD
/// in `peak` and F the mean in `floor`, both averaged over chunks, the SNR is
/// the excess (P − F)/F in dB. Throws InvalidParameter if d exceeds the record or is shorter than
/// 10 cycles of f_m.
std::vector<SnrPoint> snr_vs_time(std::span<const double> record, double sample_rate,
                                  std::span<const double> durations, const SnrOptions& options);

/// Streaming form of snr_vs_time.
class SnrAccumulator {
 public:
  SnrAccumulator(double sample_rate, std::span<const double> durations, const SnrOptions& options);
  ~SnrAccumulator();
  SnrAccumulator(SnrAccumulator&&) noexcept;
  SnrAccumulator& operator=(SnrAccumulator&&) noexcept;

  void push(std::span<const double> block);
  std::vector<SnrPoint> result() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// SNR(T)/SNR(∞) for a Lorentzian of FWHM gamma_hz seen through a rectangular
/// window of length T: 1 − (1 − e^{−a})/a with a = π·gamma_hz·T.
double finite_time_snr_factor(double gamma_hz, double duration);

}  // namespace sfom
