#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "sfom/backaction.hpp"
#include "sfom/backaction_fit.hpp"
#include "sfom/csv.hpp"
#include "sfom/fft.hpp"
#include "sfom/langevin.hpp"
#include "sfom/scenarios.hpp"
#include "sfom/spectral.hpp"
#include "sfom/superfluid.hpp"
#include "sfom/tracker.hpp"

namespace sfom::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Sweep {
  double start, stop;
  std::size_t count;
};

Sweep parse_sweep(const std::string& text) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError("--sweep expects start:stop:count");
  try {
    const double start = parse_double(parts[0]), stop = parse_double(parts[1]), n = parse_double(parts[2]);
    if (!(n >= 1.0) || n != std::floor(n)) throw UsageError("--sweep count must be a positive integer");
    if (n == 1.0 && start != stop) throw UsageError("--sweep with one point needs start == stop");
    return {start, stop, static_cast<std::size_t>(n)};
  } catch (const InvalidParameter&) {
    throw UsageError("--sweep expects numbers start:stop:count");
  }
}

CsvTable read_table(const Invocation& inv, OutputDir& out) {
  return parse_csv(out.read_input(inv.text("input")));
}

bool has_column(const CsvTable& t, std::string_view name) {
  return std::find(t.header.begin(), t.header.end(), name) != t.header.end();
}

// --rate if given, otherwise the spacing of the t_s column.
double record_rate(const Invocation& inv, const CsvTable& table) {
  if (inv.has("rate")) return inv.number("rate");
  if (!has_column(table, "t_s")) throw UsageError("trace has no t_s column; pass --rate");
  const auto t = table.column_values("t_s");
  if (t.size() < 2) throw InvalidParameter("trace needs at least two samples");
  const double fs = static_cast<double>(t.size() - 1) / (t.back() - t.front());
  if (!(fs > 0.0) || !std::isfinite(fs)) throw InvalidParameter("t_s column is not increasing");
  const double rounded = std::round(fs);
  return std::abs(fs - rounded) <= 1e-9 * fs ? rounded : fs;
}

Json fit_errors(const SpectrumFit& f) {
  return {{"f_m_hz", f.f_m_err}, {"gamma_hz", f.gamma_err}, {"amplitude", f.amplitude_err},
          {"floor", f.floor_err}, {"area", f.area_err}};
}

// ------------------------------------------------------------ handlers

void run_backaction(const Invocation& inv, OutputDir& out) {
  const auto cfg = inv.config();
  const auto sweep = parse_sweep(inv.text("sweep"));
  const auto detunings = linspace(sweep.start, sweep.stop, sweep.count);
  std::vector<std::vector<double>> rows;
  for (const auto& p : detuning_sweep(cfg.params, detunings)) {
    rows.push_back({p.detuning_over_kappa, p.delta_omega / kTwoPi, p.delta_gamma / kTwoPi, p.effective_gamma / kTwoPi,
                    p.temperature_ratio});
  }
  out.write_table("backaction",
                  {"detuning_over_kappa", "delta_omega_hz", "delta_gamma_hz", "gamma_eff_hz", "temperature_ratio"}, rows,
                  inv.format);
}

void run_fit_sweep(const Invocation& inv, OutputDir& out) {
  const auto cfg = inv.config();
  const auto table = read_table(inv, out);
  const auto d = table.column_values("detuning_over_kappa");
  const auto g = table.column_values("gamma_hz");
  const auto ge = table.column_values("gamma_err_hz");
  const auto w = table.column_values("domega_hz");
  const auto we = table.column_values("domega_err_hz");
  std::vector<SweepSample> samples;
  for (std::size_t i = 0; i < d.size(); ++i) {
    samples.push_back({d[i], kTwoPi * g[i], kTwoPi * ge[i], kTwoPi * w[i], kTwoPi * we[i]});
  }
  const auto fixed = sweep_fixed(cfg.params);
  SweepFitOptions opt;
  const auto& coupling = inv.text("coupling");
  if (coupling == "config") {
    opt.coupling_scale = coupling_scale(cfg.params);
  } else if (coupling != "free") {
    opt.coupling_scale = inv.number("coupling");
  }
  const auto fit = fit_detuning_sweep(samples, fixed, opt);

  Json j;
  j["beta_times_a"] = fit.beta_times_a;
  j["beta_times_a_err"] = fit.beta_times_a_err;
  j["tau_t_s"] = fit.tau_t;
  j["tau_t_err_s"] = fit.tau_t_err;
  j["coupling_scale_rad2_per_s2"] = fit.coupling_scale;
  j["coupling_scale_err"] = fit.coupling_scale_err;
  j["coupling_scale_fixed"] = fit.coupling_scale_fixed;
  j["reduced_chi2"] = number_or_null(fit.reduced_chi2);
  j["residual_norm"] = fit.residual_norm;
  j["points"] = fit.points;
  j["iterations"] = fit.iterations;
  out.write_json("fit.json", j);

  std::vector<std::vector<double>> rows;
  for (double x : d) {
    const auto m = sweep_model(fixed, fit.params(), x);
    rows.push_back({x, (fixed.gamma_0 + m.delta_gamma) / kTwoPi, m.delta_omega / kTwoPi});
  }
  out.write_table("fit_curve", {"detuning_over_kappa", "gamma_hz", "domega_hz"}, rows, inv.format);
}

void run_simulate(const Invocation& inv, OutputDir& out) {
  SimConfig c;
  c.params = inv.config().params;
  c.duration = inv.number("duration");
  c.sample_rate = inv.number("rate");
  c.seed = inv.seed;
  c.model = parse_cavity_model(inv.text("mode"));
  c.shot_noise_floor = inv.number("shot-floor");
  Simulator sim(c);

  const bool with_time = inv.format != "json";
  std::ostringstream csv;
  csv << (with_time ? "t_s,x_m,homodyne_m\n" : "x_m,homodyne_m\n");
  std::vector<double> x(1 << 16), y(x.size());
  std::size_t index = 0;
  while (sim.remaining() > 0) {
    const std::size_t got = sim.next_block(x, y);
    if (got == 0) break;
    for (std::size_t i = 0; i < got; ++i, ++index) {
      if (with_time) csv << format_double(static_cast<double>(index) / c.sample_rate) << ',';
      csv << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
    }
  }
  out.write("trace.csv", csv.str());

  std::ostringstream hash;
  hash << std::hex << config_hash(c);
  Json header;
  header["columns"] = with_time ? Json{"t_s", "x_m", "homodyne_m"} : Json{"x_m", "homodyne_m"};
  header["t0_s"] = 0.0;
  header["sample_rate_hz"] = c.sample_rate;
  header["samples"] = index;
  header["seed"] = c.seed;
  header["model"] = to_string(c.model);
  header["shot_noise_floor_m2_per_hz"] = c.shot_noise_floor;
  header["config_hash"] = hash.str();
  header["unstable"] = sim.unstable();
  out.write_json("trace.json", header);
  if (sim.unstable()) throw std::domain_error("simulation became non-finite after " + std::to_string(index) + " samples");
}

void run_analyze(const Invocation& inv, OutputDir& out) {
  const auto table = read_table(inv, out);
  const auto values = table.column_values(inv.text("column"));
  const double fs = record_rate(inv, table);
  WelchOptions w;
  w.segment_length = inv.count("segment");
  w.overlap = inv.number("overlap");
  w.window = parse_window(inv.text("window"));
  const auto& detrend = inv.text("detrend");
  if (detrend != "true" && detrend != "false") throw UsageError("--detrend must be true or false");
  w.detrend = detrend == "true";
  const auto psd = welch_psd(values, fs, w);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < psd.values.size(); ++k) rows.push_back({psd.frequencies[k], psd.values[k]});
  out.write_table("psd", {"freq_hz", "psd"}, rows, inv.format);

  const auto [lo, hi] = inv.band("band");
  const auto fit = fit_mode(psd, {lo, hi});
  Json j;
  j["f_m_hz"] = fit.f_m;
  j["gamma_hz"] = fit.gamma;
  j["area"] = fit.area;
  j["floor"] = fit.floor;
  j["amplitude"] = fit.amplitude;
  j["errors"] = fit_errors(fit);
  j["chi2"] = number_or_null(fit.reduced_chi2);
  j["points"] = fit.points;
  j["segments"] = psd.segment_count;
  j["sample_rate_hz"] = fs;
  j["resolution_bandwidth_hz"] = psd.resolution_bandwidth;
  out.write_json("fit.json", j);
}

WienerFilter pass_through(double fs) {
  const auto grid = psd_on_grid(fs, 2048, [](double) { return 1.0; });
  return design_zero_phase(grid.frequencies, grid.values, fs);
}

void run_track(const Invocation& inv, OutputDir& out) {
  const auto params = inv.config().params;
  const auto table = read_table(inv, out);
  const auto values = table.column_values(inv.text("column"));
  const double fs = record_rate(inv, table);
  const DemodSettings settings{inv.number("fm"), inv.number("lp-bw"), inv.number("bin-time")};
  const double floor = inv.number("shot-floor");
  if (!(floor >= 0.0)) throw UsageError("--shot-floor must be >= 0");

  WienerFilter filter;
  if (floor > 0.0) {
    // Thermal Lorentzian of the configured mode with its backaction shifts.
    const auto pt = backaction_point(params);
    const double f_eff = params.mode.omega_m.hz() + pt.delta_omega / kTwoPi;
    const double g_eff = pt.effective_gamma / kTwoPi;
    if (!(g_eff > 0.0)) throw InvalidParameter("configured mode is unstable; no Wiener model");
    const double c = thermal_psd_amplitude(params.mode.gamma_m.hz(), params.mode.m_eff, params.mode.temperature);
    const auto grid = next_pow2(static_cast<std::size_t>(std::ceil(20.0 * fs / g_eff)));
    const auto signal = psd_on_grid(fs, grid, [&](double f) {
      const double d = f_eff * f_eff - f * f;
      return c / (d * d + f * f * g_eff * g_eff);
    });
    const auto noise = psd_on_grid(fs, grid, [&](double) { return 2.0 * floor; });
    filter = design_wiener(signal, noise);
  } else {
    filter = pass_through(fs);
  }
  const auto track = demodulate(values, fs, filter, settings, {floor, inv.seed, inv.count("noise-points")});

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < track.size(); ++i) rows.push_back({track.times[i], track.x[i], track.y[i]});
  out.write_table("track", {"t_s", "x_quad_m", "y_quad_m"}, rows, inv.format);

  Json j;
  j["points"] = track.size();
  j["bin_time_s"] = settings.bin_time;
  j["thermal_std"] = track.thermal_std;
  j["measurement_std"] = track.measurement_std;
  j["ratio"] = number_or_null(track.ratio());
  Json kx = nullptr, ky = nullptr, se = nullptr;
  if (track.size() >= 500) {
    const auto st = track_statistics(track);
    kx = st.kurtosis_x;
    ky = st.kurtosis_y;
    se = st.kurtosis_se;
  }
  j["kurtosis_x"] = kx;
  j["kurtosis_y"] = ky;
  j["kurtosis_se"] = se;
  j["decorrelation_time_s"] = track.size() >= 8 ? Json(decorrelation_time(track.x, settings.bin_time)) : Json(nullptr);
  j["filter"] = {{"taps", filter.taps.size()}, {"ripple", filter.ripple}};
  out.write_json("stats.json", j);
}

void run_film(const Invocation& inv, OutputDir& out) {
  const SuperfluidFilm film{inv.number("thickness-nm"), inv.number("fraction"), inv.number("alpha")};
  const double c = third_sound_speed(film);
  const double length = inv.number("length-m");
  struct Row {
    double zeta;
    std::string source;
  };
  std::vector<Row> zetas;
  if (inv.has("zeta")) {
    for (double z : inv.numbers("zeta")) zetas.push_back({z, "supplied"});
  }
  const double bessel = inv.number("bessel");
  if (bessel > 0.0) {
    const int n = static_cast<int>(bessel);
    auto table = circular_membrane_zeros(n, n);
    table.resize(static_cast<std::size_t>(n));
    for (const auto& z : table) {
      zetas.push_back({z.value, "circular membrane j(" + std::to_string(z.order) + "," + std::to_string(z.index) + ")"});
    }
  }

  std::cout << "c_s = " << format_double(c) << " m/s\n";
  Json modes = Json::array();
  std::vector<std::vector<double>> rows;
  for (const auto& z : zetas) {
    const double f = mode_frequency(film, length, z.zeta);
    std::cout << "  zeta " << format_double(z.zeta) << "  f = " << format_double(f) << " Hz  (" << z.source << ")\n";
    modes.push_back({{"zeta", z.zeta}, {"frequency_hz", f}, {"source", z.source}});
    rows.push_back({z.zeta, f});
  }
  Json j;
  j["thickness_nm"] = film.thickness_nm;
  j["superfluid_fraction"] = film.superfluid_fraction;
  j["alpha_vdw_nm5_per_s2"] = film.alpha_vdw;
  j["length_m"] = length;
  j["c_s_m_per_s"] = c;
  j["modes"] = std::move(modes);
  out.write_json("film.json", j);
  if (!rows.empty()) out.write_table("modes", {"zeta", "frequency_hz"}, rows, inv.format);
}

void run_bath(const Invocation& inv, OutputDir& out) {
  const double t = inv.number("temperature");
  const bool densities = inv.has("s-plus") || inv.has("s-minus");
  const bool explicit_bath = inv.has("tb") || inv.has("gamma-b-hz");
  if (densities == explicit_bath) {
    throw UsageError("give either --s-plus/--s-minus (with --config) or --tb/--gamma-b-hz");
  }
  Json j;
  j["temperature_k"] = t;
  double t_final = 0.0;
  if (densities) {
    auto mode = inv.config().params.mode;
    if (inv.has("gamma0-hz")) mode.gamma_m = Frequency::from_hz(inv.number("gamma0-hz"));
    const NonEquilibriumBath bath{inv.number("s-plus"), inv.number("s-minus")};
    bath.validate();
    const auto tb = (bath.s_plus > 0.0 && bath.s_minus > 0.0) ? bath_temperature(bath, mode.omega_m.angular())
                                                              : std::optional<double>{};
    const double gb = bath_coupling(bath, mode) / kTwoPi;
    t_final = final_temperature(t, bath, mode);
    j["gamma0_hz"] = mode.gamma_m.hz();
    j["bath_temperature_k"] = tb ? Json(*tb) : Json(nullptr);
    j["gamma_b_hz"] = gb;
    j["total_linewidth_hz"] = mode.gamma_m.hz() + gb;
  } else {
    const double g0 = inv.has("gamma0-hz") ? inv.number("gamma0-hz") : inv.config().params.mode.gamma_m.hz();
    const double tb = inv.number("tb"), gb = inv.number("gamma-b-hz");
    t_final = final_temperature(t, g0, tb, gb);
    j["gamma0_hz"] = g0;
    j["bath_temperature_k"] = tb;
    j["gamma_b_hz"] = gb;
    j["total_linewidth_hz"] = g0 + gb;
  }
  j["t_final_k"] = t_final;
  std::cout << "T_final = " << format_double(t_final) << " K\n";
  out.write_json("bath.json", j);
}

void run_fit_power(const Invocation& inv, OutputDir& out) {
  const auto table = read_table(inv, out);
  const auto p = table.column_values("power_w");
  const auto v = table.column_values("value");
  const std::vector<double> e = has_column(table, "err") ? table.column_values("err") : std::vector<double>{};
  const auto fit = fit_power_law(p, v, e);
  Json j;
  j["a"] = fit.a;
  j["b"] = fit.b;
  j["c"] = fit.c;
  j["a_err"] = fit.a_err;
  j["b_err"] = fit.b_err;
  j["c_err"] = fit.c_err;
  j["reduced_chi2"] = number_or_null(fit.reduced_chi2);
  j["residual_norm"] = fit.residual_norm;
  j["points"] = fit.points;
  j["weighted"] = !e.empty();
  j["power_unit"] = "W";
  out.write_json("fit.json", j);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < p.size(); ++i) rows.push_back({p[i], v[i], fit.evaluate(p[i])});
  out.write_table("fit_curve", {"power_w", "value", "fit"}, rows, inv.format);
}

std::vector<CommandSpec> build() {
  return {
      {"backaction", "Optical spring and damping versus detuning", ConfigUse::Required,
       {{"sweep", "-1:0:41", "start:stop:count in units of kappa"}}, run_backaction},
      {"fit-sweep", "Fit a measured detuning sweep", ConfigUse::Required,
       {{"input", "", "CSV: detuning_over_kappa,gamma_hz,gamma_err_hz,domega_hz,domega_err_hz", true},
        {"coupling", "config", "coupling scale: config, free, or a value in rad^2/s^2"}},
       run_fit_sweep},
      {"simulate", "Stochastic time-domain simulation", ConfigUse::Required,
       {{"duration", "", "record length, s", true},
        {"rate", "", "sample rate, Hz", true},
        {"mode", "adiabatic", "adiabatic or full"},
        {"shot-floor", "0", "double-sided displacement noise floor, m^2/Hz"}},
       run_simulate},
      {"analyze", "Welch PSD and single-mode fit of a trace", ConfigUse::None,
       {{"input", "", "trace CSV", true},
        {"column", "homodyne_m", "column to analyse"},
        {"rate", "", "sample rate, Hz (default: from t_s)"},
        {"segment", "65536", "Welch segment length"},
        {"overlap", "0.5", "segment overlap fraction"},
        {"window", "hann", "hann or rectangular"},
        {"detrend", "true", "subtract each segment's mean"},
        {"band", "", "fit band lo:hi in Hz", true}},
       run_analyze},
      {"track", "Wiener-filtered quadrature track of a trace", ConfigUse::Required,
       {{"input", "", "trace CSV", true},
        {"column", "homodyne_m", "column to track"},
        {"rate", "", "sample rate, Hz (default: from t_s)"},
        {"fm", "", "demodulation frequency, Hz", true},
        {"bin-time", "", "output spacing, s", true},
        {"lp-bw", "", "low-pass corner, Hz", true},
        {"shot-floor", "0", "double-sided measurement noise floor, m^2/Hz"},
        {"noise-points", "1000", "length of the synthetic noise track"}},
       run_track},
      {"film", "Third-sound speed and mode frequencies", ConfigUse::None,
       {{"thickness-nm", "10", "film thickness, nm"},
        {"fraction", "1", "superfluid fraction"},
        {"alpha", "2.65e21", "van der Waals coefficient, nm^5/s^2"},
        {"length-m", "1e-6", "length scale L, m"},
        {"zeta", "", "comma-separated mode eigenvalues"},
        {"bessel", "0", "also list the first N circular-membrane zeros"}},
       run_film},
      {"bath", "Steady-state temperature with a non-equilibrium bath", ConfigUse::Optional,
       {{"temperature", "", "environment temperature, K", true},
        {"gamma0-hz", "", "intrinsic linewidth, Hz (default: from config)"},
        {"tb", "", "bath temperature, K"},
        {"gamma-b-hz", "", "bath coupling, Hz"},
        {"s-plus", "", "bath density at +omega_m, N^2 s"},
        {"s-minus", "", "bath density at -omega_m, N^2 s"}},
       run_bath},
      {"fit-power", "Fit y = a P^b + c", ConfigUse::None, {{"input", "", "CSV: power_w,value[,err]", true}},
       run_fit_power},
      {"repro", "Regenerate a figure's data and checks", ConfigUse::None,
       {{"figure", "", "fig3, fig4 or si-fig2", true, true},
        {"rate", "10e6", "fig3 sample rate, Hz"},
        {"snr-db", "20.5", "fig3 in-band SNR, dB"},
        {"track-points", "4700", "fig3 track length"},
        {"thermal-times", "200", "fig3 bare-mode run in linewidth times (0 skips)"}},
       run_repro},
  };
}

}  // namespace

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> table = build();
  return table;
}

const CommandSpec* find_command(std::string_view name) {
  for (const auto& c : commands()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace sfom::cli
