#pragma once

// End-to-end pipelines behind the `repro` recipes: detuning sweeps and their
// fits, the thermal-spectrum and tracking chain, simulated energy ratios under
// backaction, and power-law fits of power-dependent data. Each result carries
// the plot-ready series and a list of named checks.

#include <cstdint>
#include <string>
#include <vector>

#include "sfom/backaction.hpp"
#include "sfom/backaction_fit.hpp"
#include "sfom/langevin.hpp"
#include "sfom/spectral.hpp"
#include "sfom/superfluid.hpp"
#include "sfom/tracker.hpp"

namespace sfom {

struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  bool pass() const { return value >= lo && value <= hi; }
};

bool all_pass(const std::vector<Check>& checks);

// ------------------------------------------------------------ sweeps

struct SweepReproduction {
  std::string label;
  SystemParams params;
  std::vector<double> detunings;
  std::vector<BackactionPoint> model;
  std::vector<SweepSample> clean;
  std::vector<SweepSample> noisy;
  BackactionFit clean_fit;
  BackactionFit noisy_fit;
  /// Γ_0/Γ_eff from the noisy-fit parameters at the damping anchor.
  double fitted_temperature_ratio = 0.0;
  /// δω/2π (Hz) from the noisy-fit parameters at the shift anchor.
  double fitted_shift_hz = 0.0;
};

/// Model Γ_0/Γ_eff at `detuning` for fitted sweep parameters.
double sweep_temperature_ratio(const SweepFitFixed& fixed, const SweepModelParams& model, double detuning);

SweepReproduction reproduce_sweep(const std::string& label, const SystemParams& params,
                                  const std::vector<double>& detunings, double noise_fraction,
                                  std::uint64_t seed);

struct SweepFigure {
  SweepReproduction cooling;
  SweepReproduction heating;
  std::vector<Check> checks;
};

/// Both reference modes swept over Δ/κ ∈ [−1, 0] (41 points), fitted with the
/// coupling scale pinned, at 5% noise.
SweepFigure reproduce_sweep_figure(std::uint64_t seed);

// ------------------------------------------------------------ spectra

/// Runs the simulator and streams its record into a Welch estimate, without
/// holding the trace. `use_homodyne` selects the record with shot noise.
Psd simulate_psd(const SimConfig& config, const WelchOptions& welch, bool use_homodyne = false);

struct ThermalSpectrum {
  SimConfig config;
  Psd psd;
  SpectrumFit fit;
  double equipartition_variance = 0.0;  // m², k_B·T/k of the bare mode
};

/// Welch segments sized to ~γ/10 resolution; fitted over f_m ± 20·γ around
/// the expected effective resonance.
ThermalSpectrum thermal_spectrum(const SimConfig& config);

struct EnergyRatio {
  ThermalSpectrum reference;  // same mode and seed at Δ = 0
  ThermalSpectrum detuned;
  double expected = 0.0;  // Γ_0/Γ_eff from the model
  double measured = 0.0;  // fitted area ratio detuned/reference

  double relative_error() const { return measured / expected - 1.0; }
};

EnergyRatio simulated_energy_ratio(const SystemParams& detuned, double duration, double sample_rate,
                                   std::uint64_t seed);

// ------------------------------------------------------------ tracking

struct TrackingOptions {
  std::uint64_t seed = 1;
  double sample_rate = 10e6;
  double snr_db = 20.5;
  std::size_t track_points = 4700;
  /// Bare-mode run for the thermal-spectrum check, in units of 1/γ; 0 skips it.
  double thermal_linewidth_times = 200.0;
};

struct TrackingFigure {
  TrackingOptions options;
  SystemParams params;
  double shot_noise_floor = 0.0;
  ThermalSpectrum thermal;
  Psd homodyne_psd;
  std::vector<SnrPoint> snr_plateau;
  std::vector<SnrPoint> snr_slope;
  double plateau_mean_db = 0.0;
  double plateau_spread_db = 0.0;  // max deviation from the mean
  double slope_db_per_decade = 0.0;
  DemodSettings demod;
  PhaseSpaceTrack track;
  TrackStatistics statistics;
  double decorrelation_time = 0.0;  // of X, s
  std::vector<Check> checks;
};

/// Undriven 482 kHz mode with shot noise set for the requested in-band SNR:
/// SNR versus record length, a Wiener-filtered quadrature track at bin time
/// 1/(4·γ) with a 4·γ low-pass, and the bare thermal-spectrum fit.
TrackingFigure reproduce_tracking_figure(const TrackingOptions& options = {});

// ------------------------------------------------------------ power laws

struct PowerLawSeries {
  std::string label;
  double a = 0.0, b = 0.0, c = 0.0;  // generating values, P in nW
  std::vector<double> powers_nw;
  std::vector<double> clean;
  std::vector<double> noisy;
  std::vector<double> errors;
  PowerLawFit clean_fit;
  PowerLawFit noisy_fit;
};

struct PowerLawFigure {
  std::vector<PowerLawSeries> series;
  std::vector<Check> checks;
};

/// Mode energies ∝ P^0.60 and P^0.69 and linewidths 16.0·P^0.38 + 19.3 and
/// 49.2·P^0.14 + 23.4 on 20 log-spaced powers in 7–250 nW, fitted clean and
/// at 5% noise.
PowerLawFigure reproduce_power_law_figure(std::uint64_t seed);

}  // namespace sfom
