#include "sfom/reproduce.hpp"

#include <algorithm>
#include <cmath>

#include "sfom/fft.hpp"
#include "sfom/random.hpp"
#include "sfom/scenarios.hpp"

namespace sfom {

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

namespace {

double rel_err(double estimate, double truth) { return std::abs(estimate / truth - 1.0); }

double z_score(double estimate, double truth, double err) {
  return err > 0.0 ? std::abs(estimate - truth) / err : std::numeric_limits<double>::infinity();
}

}  // namespace

// ------------------------------------------------------------ sweeps

double sweep_temperature_ratio(const SweepFitFixed& fixed, const SweepModelParams& model, double detuning) {
  const double gamma = fixed.gamma_0 + sweep_model(fixed, model, detuning).delta_gamma;
  return gamma > 0.0 ? fixed.gamma_0 / gamma : std::numeric_limits<double>::quiet_NaN();
}

SweepReproduction reproduce_sweep(const std::string& label, const SystemParams& params,
                                  const std::vector<double>& detunings, double noise_fraction,
                                  std::uint64_t seed) {
  SweepReproduction r;
  r.label = label;
  r.params = params;
  r.detunings = detunings;
  r.model = detuning_sweep(params, detunings);
  r.clean = synthetic_sweep(params, detunings);
  r.noisy = synthetic_sweep(params, detunings, noise_fraction, seed);
  const auto fixed = sweep_fixed(params);
  SweepFitOptions options;
  options.coupling_scale = coupling_scale(params);
  r.clean_fit = fit_detuning_sweep(r.clean, fixed, options);
  r.noisy_fit = fit_detuning_sweep(r.noisy, fixed, options);
  r.fitted_temperature_ratio = sweep_temperature_ratio(fixed, r.noisy_fit.params(), reference::damping_detuning);
  r.fitted_shift_hz =
      sweep_model(fixed, r.noisy_fit.params(), reference::shift_detuning).delta_omega / constants::two_pi;
  return r;
}

namespace {

void sweep_checks(const SweepReproduction& r, double target_ratio, std::vector<Check>& out) {
  const double beta_a = r.params.coupling.beta_a();
  const double tau = r.params.coupling.tau_t;
  const double scale = coupling_scale(r.params);
  const auto& c = r.clean_fit;
  const auto& n = r.noisy_fit;
  out.push_back({r.label + ".clean.beta_a.rel_err", rel_err(c.beta_times_a, beta_a), 0.0, 0.05});
  out.push_back({r.label + ".clean.tau_t.rel_err", rel_err(c.tau_t, tau), 0.0, 0.05});
  out.push_back({r.label + ".clean.coupling_scale.rel_err", rel_err(c.coupling_scale, scale), 0.0, 0.05});
  out.push_back({r.label + ".noisy.beta_a.z", z_score(n.beta_times_a, beta_a, n.beta_times_a_err), 0.0, 3.0});
  out.push_back({r.label + ".noisy.tau_t.z", z_score(n.tau_t, tau, n.tau_t_err), 0.0, 3.0});
  out.push_back({r.label + ".temperature_ratio.rel_err", rel_err(r.fitted_temperature_ratio, target_ratio), 0.0, 0.10});
}

}  // namespace

SweepFigure reproduce_sweep_figure(std::uint64_t seed) {
  const auto detunings = linspace(-1.0, 0.0, 41);
  SweepFigure fig;
  fig.cooling = reproduce_sweep("cooling", cooling_mode(), detunings, 0.05, seed);
  fig.heating = reproduce_sweep("heating", heating_mode(), detunings, 0.05, seed + 1);
  sweep_checks(fig.cooling, 0.25, fig.checks);
  sweep_checks(fig.heating, 2.8, fig.checks);
  return fig;
}

// ------------------------------------------------------------ spectra

Psd simulate_psd(const SimConfig& config, const WelchOptions& welch, bool use_homodyne) {
  Simulator sim(config);
  WelchAccumulator acc(config.sample_rate, welch);
  std::vector<double> x(1 << 16), y(use_homodyne ? x.size() : 0);
  while (sim.remaining() > 0) {
    const std::size_t got = sim.next_block(x, y);
    acc.push(std::span<const double>(use_homodyne ? y : x).first(got));
    if (sim.unstable()) throw InvalidParameter("simulation became unstable");
  }
  return acc.result();
}

ThermalSpectrum thermal_spectrum(const SimConfig& config) {
  config.validate();
  const auto point = backaction_point(config.params);
  if (!point.stable()) throw InvalidParameter("mode is past the instability threshold");
  const double f_eff = config.params.mode.omega_m.hz() + point.delta_omega / constants::two_pi;
  const double gamma_eff = point.effective_gamma / constants::two_pi;
  WelchOptions welch;
  welch.segment_length = next_pow2(static_cast<std::size_t>(std::ceil(10.0 * config.sample_rate / gamma_eff)));
  while (welch.segment_length > config.sample_count() / 4) welch.segment_length /= 2;
  ThermalSpectrum out;
  out.config = config;
  out.psd = simulate_psd(config, welch);
  out.fit = fit_mode(out.psd, {f_eff - 20.0 * gamma_eff, f_eff + 20.0 * gamma_eff});
  out.equipartition_variance = config.params.mode.thermal_variance();
  return out;
}

EnergyRatio simulated_energy_ratio(const SystemParams& detuned, double duration, double sample_rate,
                                   std::uint64_t seed) {
  SimConfig config;
  config.duration = duration;
  config.sample_rate = sample_rate;
  config.seed = seed;
  EnergyRatio out;
  config.params = detuned.with_detuning(0.0);
  out.reference = thermal_spectrum(config);
  config.params = detuned;
  out.detuned = thermal_spectrum(config);
  out.expected = backaction_point(detuned).temperature_ratio;
  out.measured = out.detuned.fit.area / out.reference.fit.area;
  return out;
}

// ------------------------------------------------------------ tracking

namespace {

double regression_slope(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (sxy - sx * sy / n) / (sxx - sx * sx / n);
}

}  // namespace

TrackingFigure reproduce_tracking_figure(const TrackingOptions& options) {
  TrackingFigure fig;
  fig.options = options;
  fig.params = thermal_mode();
  const auto& mode = fig.params.mode;
  const double f_m = mode.omega_m.hz();
  const double gamma = mode.gamma_m.hz();
  const double fs = options.sample_rate;
  fig.shot_noise_floor = shot_floor_for_snr(mode, options.snr_db);

  SimConfig bare;
  bare.params = fig.params;
  bare.sample_rate = fs;
  bare.duration = options.thermal_linewidth_times / gamma;
  bare.seed = options.seed;
  if (options.thermal_linewidth_times > 0.0) fig.thermal = thermal_spectrum(bare);

  // Wiener filter from the known signal and noise models.
  const double amplitude = thermal_psd_amplitude(gamma, mode.m_eff, mode.temperature);
  const std::size_t grid = next_pow2(static_cast<std::size_t>(std::ceil(20.0 * fs / gamma)));
  const auto signal = psd_on_grid(fs, grid, [&](double f) {
    const double d = f_m * f_m - f * f;
    return amplitude / (d * d + f * f * gamma * gamma);
  });
  const double floor = 2.0 * fig.shot_noise_floor;
  const auto noise = psd_on_grid(fs, grid, [&](double) { return floor; });
  const auto filter = design_wiener(signal, noise);

  fig.demod = {f_m, 4.0 * gamma, 1.0 / (4.0 * gamma)};
  Demodulator demod(fs, filter, fig.demod);

  SimConfig run = bare;
  run.shot_noise_floor = fig.shot_noise_floor;
  const std::size_t needed = demod.samples_for(options.track_points);
  run.duration = (static_cast<double>(needed) + 0.5) / fs;

  const double t0 = 1.0 / gamma;  // 2π/Γ_m
  const std::vector<double> plateau{2.0 * t0, 4.0 * t0, 8.0 * t0, 16.0 * t0};
  std::vector<double> slope;
  for (int i = 0; i < 6; ++i) slope.push_back(t0 * std::pow(10.0, std::log10(1.0 / 300.0) + i * std::log10(30.0) / 5.0));
  SnrOptions snr;
  snr.f_m = f_m;
  snr.peak = {f_m - 50e3, f_m + 50e3};
  snr.floor = {f_m + 200e3, f_m + 400e3};
  snr.max_chunks = 100;
  SnrAccumulator plateau_acc(fs, plateau, snr);
  snr.max_chunks = 2000;
  SnrAccumulator slope_acc(fs, slope, snr);
  WelchOptions welch;
  welch.segment_length = 1 << 20;
  WelchAccumulator psd_acc(fs, welch);

  Simulator sim(run);
  std::vector<double> x(1 << 16), y(x.size());
  std::vector<QuadraturePoint> points;
  while (sim.remaining() > 0) {
    const std::size_t got = sim.next_block(x, y);
    const std::span<const double> h = std::span<const double>(y).first(got);
    plateau_acc.push(h);
    slope_acc.push(h);
    psd_acc.push(h);
    demod.push(h, points);
  }
  demod.finish(points);
  if (points.size() > options.track_points) points.resize(options.track_points);

  fig.homodyne_psd = psd_acc.result();
  fig.snr_plateau = plateau_acc.result();
  fig.snr_slope = slope_acc.result();
  double mean = 0.0;
  for (const auto& p : fig.snr_plateau) mean += p.snr_db;
  mean /= static_cast<double>(fig.snr_plateau.size());
  fig.plateau_mean_db = mean;
  for (const auto& p : fig.snr_plateau) fig.plateau_spread_db = std::max(fig.plateau_spread_db, std::abs(p.snr_db - mean));
  std::vector<double> lx, ly;
  for (const auto& p : fig.snr_slope) {
    lx.push_back(std::log10(p.duration));
    ly.push_back(p.snr_db);
  }
  fig.slope_db_per_decade = regression_slope(lx, ly);

  const double m_std = measurement_std(fs, filter, fig.demod, {fig.shot_noise_floor, options.seed, 1000});
  fig.track = make_track(points, fig.demod.bin_time, m_std);
  fig.statistics = track_statistics(fig.track);
  fig.decorrelation_time = decorrelation_time(fig.track.x, fig.demod.bin_time);

  const auto& th = fig.thermal;
  auto& c = fig.checks;
  if (options.thermal_linewidth_times > 0.0) {
    c.push_back({"thermal.gamma.rel_err", rel_err(th.fit.gamma, gamma), 0.0, 0.10});
    c.push_back({"thermal.f_m.abs_err_hz", std::abs(th.fit.f_m - f_m), 0.0, 1.0});
    c.push_back({"thermal.area.rel_err", rel_err(th.fit.area, th.equipartition_variance), 0.0, 0.05});
  }
  c.push_back({"snr.plateau.spread_db", fig.plateau_spread_db, 0.0, 1.5});
  c.push_back({"snr.slope_db_per_decade", fig.slope_db_per_decade, 8.0, 12.0});
  c.push_back({"track.ratio", fig.track.ratio(), 4.0, 9.0});
  c.push_back({"track.kurtosis_x.sigmas", std::abs(fig.statistics.kurtosis_x) / fig.statistics.kurtosis_se, 0.0, 3.0});
  c.push_back({"track.kurtosis_y.sigmas", std::abs(fig.statistics.kurtosis_y) / fig.statistics.kurtosis_se, 0.0, 3.0});
  return fig;
}

// ------------------------------------------------------------ power laws

PowerLawFigure reproduce_power_law_figure(std::uint64_t seed) {
  struct Spec {
    const char* label;
    double a, b, c;
  };
  // Energies in units of the zero-power thermal energy; linewidths in Hz.
  const Spec specs[] = {{"energy_482khz", 0.3, 0.60, 1.0},
                        {"energy_522khz", 0.2, 0.69, 1.0},
                        {"linewidth_482khz", 16.0, 0.38, 19.3},
                        {"linewidth_522khz", 49.2, 0.14, 23.4}};
  const auto log_powers = linspace(std::log(7.0), std::log(250.0), 20);
  PowerLawFigure fig;
  std::uint64_t stream = 0;
  for (const auto& spec : specs) {
    PowerLawSeries s;
    s.label = spec.label;
    s.a = spec.a;
    s.b = spec.b;
    s.c = spec.c;
    NormalStream noise(seed, stream++);
    for (double lp : log_powers) {
      const double p = std::exp(lp);
      const double y = spec.a * std::pow(p, spec.b) + spec.c;
      s.powers_nw.push_back(p);
      s.clean.push_back(y);
      s.errors.push_back(0.05 * y);
      s.noisy.push_back(y + 0.05 * y * noise());
    }
    s.clean_fit = fit_power_law(s.powers_nw, s.clean);
    s.noisy_fit = fit_power_law(s.powers_nw, s.noisy, s.errors);
    const auto& cf = s.clean_fit;
    const auto& nf = s.noisy_fit;
    const std::string l = s.label;
    fig.checks.push_back({l + ".clean.a.rel_err", rel_err(cf.a, s.a), 0.0, 1e-3});
    fig.checks.push_back({l + ".clean.b.rel_err", rel_err(cf.b, s.b), 0.0, 1e-3});
    fig.checks.push_back({l + ".clean.c.rel_err", rel_err(cf.c, s.c), 0.0, 1e-3});
    fig.checks.push_back({l + ".noisy.a.z", z_score(nf.a, s.a, nf.a_err), 0.0, 3.0});
    fig.checks.push_back({l + ".noisy.b.z", z_score(nf.b, s.b, nf.b_err), 0.0, 3.0});
    fig.checks.push_back({l + ".noisy.c.z", z_score(nf.c, s.c, nf.c_err), 0.0, 3.0});
    fig.series.push_back(std::move(s));
  }
  return fig;
}

}  // namespace sfom
