#pragma once

// Phase-space tracking of a narrowband mode in a noisy displacement record:
// noncausal Wiener smoothing, mixing to the quadratures X and Y at f_m,
// zero-phase low-pass filtering and decimation to one point per bin.
//
// Quadrature convention: x(t) = X·cos(2πf_m t) + Y·sin(2πf_m t), so a tone
// a·cos(2πf_m t − φ) maps to (a·cos φ, a·sin φ).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sfom/spectral.hpp"

namespace sfom {

/// Zero-phase FIR realisation of a real, even frequency response.
struct WienerFilter {
  std::vector<double> frequencies;  // Hz, design grid from 0 to f_s/2
  std::vector<double> gain;         // S_s/(S_s + S_n) on the grid
  /// Symmetric taps; taps[half_length] is the zero-lag tap.
  std::vector<double> taps;
  std::size_t half_length = 0;
  double sample_rate = 0.0;
  /// max |realised − ideal| / max ideal over the grid.
  double ripple = 0.0;

  std::size_t length() const { return taps.size(); }
  /// Realised response of the taps at frequency f.
  double response(double f) const;
};

struct FirDesignOptions {
  double max_ripple = 0.01;
  std::size_t initial_half_length = 16;
};

/// Truncates the inverse transform of `gain` (sampled on the full real-FFT grid
/// of a length-2(n−1) transform) symmetrically with a Hann taper, doubling the
/// length until the ripple bound holds. Throws InvalidParameter if it cannot.
WienerFilter design_zero_phase(std::vector<double> frequencies, std::vector<double> gain, double sample_rate,
                               const FirDesignOptions& options = {});

/// Pointwise S_s/(S_s + S_n). Both PSDs must share one grid and noise must be
/// positive everywhere.
WienerFilter design_wiener(const Psd& signal_psd, const Psd& noise_psd, const FirDesignOptions& options = {});

/// Evaluates a PSD model on the real-FFT grid of a length-n transform.
Psd psd_on_grid(double sample_rate, std::size_t n, const std::function<double(double)>& model);

/// |H(f)| = 1/sqrt(1 + (f/f_c)^8): the magnitude of a 4th-order Butterworth
/// low-pass, realised with zero phase.
WienerFilter design_lowpass(double sample_rate, double corner_hz, const FirDesignOptions& options = {});

struct DemodSettings {
  double f_m = 0.0;           // Hz
  double lp_bandwidth = 0.0;  // Hz, −3 dB corner of the post-mixing low-pass
  double bin_time = 0.0;      // s, spacing of the output points
};

struct QuadraturePoint {
  double t = 0.0;  // s, centre of the bin
  double x = 0.0;
  double y = 0.0;
};

/// Streaming demodulator. Output points are emitted only where both filters
/// have full support, so the first point sits (taps delay + low-pass half
/// length) into the record. Outputs are divided by the pipeline gain measured
/// with a unit tone at f_m, so they are in the record's own units.
class Demodulator {
 public:
  Demodulator(double sample_rate, const WienerFilter& filter, const DemodSettings& settings);
  ~Demodulator();
  Demodulator(Demodulator&&) noexcept;
  Demodulator& operator=(Demodulator&&) noexcept;

  void push(std::span<const double> block, std::vector<QuadraturePoint>& out);
  /// Flushes samples still held by the block filter.
  void finish(std::vector<QuadraturePoint>& out);

  double gain() const;
  /// Samples needed before the first point plus per-point spacing.
  std::size_t samples_for(std::size_t points) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct PhaseSpaceTrack {
  std::vector<double> times;
  std::vector<double> x;
  std::vector<double> y;
  double measurement_std = 0.0;
  double thermal_std = 0.0;  // pooled std of X and Y over the track
  double bin_time = 0.0;

  std::size_t size() const { return times.size(); }
  double ratio() const { return thermal_std / measurement_std; }
};

struct MeasurementNoise {
  double shot_noise_floor = 0.0;  // double-sided, units²/Hz
  std::uint64_t seed = 1;
  std::size_t points = 1000;  // length of the synthetic noise track
};

/// Std of the pipeline output for a record of pure white measurement noise,
/// pooled over both quadratures. Zero when the floor is zero.
double measurement_std(double sample_rate, const WienerFilter& filter, const DemodSettings& settings,
                       const MeasurementNoise& noise);

PhaseSpaceTrack make_track(std::span<const QuadraturePoint> points, double bin_time, double measurement_std);

/// In-memory form: runs the Demodulator over `record` and attaches both stds.
PhaseSpaceTrack demodulate(std::span<const double> record, double sample_rate, const WienerFilter& filter,
                           const DemodSettings& settings, const MeasurementNoise& noise);

struct TrackStatistics {
  std::size_t points = 0;
  double mean_x = 0.0, mean_y = 0.0;
  double cov_xx = 0.0, cov_xy = 0.0, cov_yy = 0.0;
  double kurtosis_x = 0.0, kurtosis_y = 0.0;  // excess
  double kurtosis_se = 0.0;                   // sqrt(24/n)
  std::vector<double> radial_edges;           // bins + 1 edges
  std::vector<std::size_t> radial_counts;
};

/// Requires at least 500 points.
TrackStatistics track_statistics(const PhaseSpaceTrack& track, std::size_t radial_bins = 30);

/// Exponential decay time of the normalised autocorrelation of `series`,
/// least-squares fit of ln ρ(k) = −k·dt/τ over lags with ρ > 0.1.
double decorrelation_time(std::span<const double> series, double dt);

}  // namespace sfom
