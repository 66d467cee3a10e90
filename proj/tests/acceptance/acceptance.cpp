// Acceptance suite: one line per criterion, tolerances fixed here.
//
//   sfom_acceptance [--only AC-N] [--cli PATH]
//
// Exit status is 0 when every selected criterion passes.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sfom/backaction.hpp"
#include "sfom/backaction_fit.hpp"
#include "sfom/config.hpp"
#include "sfom/csv.hpp"
#include "sfom/fft.hpp"
#include "sfom/reproduce.hpp"
#include "sfom/scenarios.hpp"
#include "sfom/superfluid.hpp"

using namespace sfom;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { lines.push_back("info " + what); }
};

struct Context {
  std::string cli;
  std::string keep;  // AC-9 working directory to leave in place
};

struct Criterion {
  std::string id;
  std::string title;
  double runtime_limit_s;
  std::function<Outcome(const Context&)> run;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

double rel_err(double value, double expected) { return std::abs(value / expected - 1.0); }

// ---------------------------------------------------------------- AC-1

Outcome third_sound() {
  Outcome out;
  // SI units: α = 2.65e21 nm⁵/s² = 2.65e-24 m⁵/s², d = 1e-8 m.
  const double alpha_si = 2.65e21 * 1e-45;
  const double d_si = 10e-9;
  const double hand = std::sqrt(3.0 * 1.0 * alpha_si / (d_si * d_si * d_si));
  const double c = third_sound_speed({10.0, 1.0, 2.65e21});
  const double err = rel_err(c, hand);
  out.expect(err <= 1e-9, "c_s = " + fmt(c, 17) + " m/s vs hand " + fmt(hand, 17) + " (rel " + fmt(err, 3) + " <= 1e-9)");
  return out;
}

// ---------------------------------------------------------------- AC-2

Outcome sweep_reproduction() {
  Outcome out;
  const auto fig = reproduce_sweep_figure(1);
  struct Target {
    const SweepReproduction* rep;
    double beta_a;
    double ratio;
  };
  for (const auto& t : {Target{&fig.cooling, reference::beta_a, 0.25}, Target{&fig.heating, -reference::beta_a, 2.8}}) {
    const auto& r = *t.rep;
    const double c_true = coupling_scale(r.params);
    const auto& clean = r.clean_fit;
    const auto& noisy = r.noisy_fit;
    out.expect(rel_err(clean.beta_times_a, t.beta_a) <= 0.05 && rel_err(clean.tau_t, reference::tau_t_s) <= 0.05 &&
                   rel_err(clean.coupling_scale, c_true) <= 0.05,
               r.label + " noiseless: betaA " + fmt(clean.beta_times_a) + ", tau " + fmt(clean.tau_t * 1e9) +
                   " ns, C " + fmt(clean.coupling_scale) + " (each within 5%)");
    const double z_b = std::abs(noisy.beta_times_a - t.beta_a) / noisy.beta_times_a_err;
    const double z_t = std::abs(noisy.tau_t - reference::tau_t_s) / noisy.tau_t_err;
    out.expect(z_b <= 3.0 && z_t <= 3.0, r.label + " 5% noise: betaA " + fmt(noisy.beta_times_a) + " +- " +
                                             fmt(noisy.beta_times_a_err, 3) + " (z " + fmt(z_b, 3) + "), tau " +
                                             fmt(noisy.tau_t * 1e9) + " +- " + fmt(noisy.tau_t_err * 1e9, 3) +
                                             " ns (z " + fmt(z_t, 3) + "), z <= 3");
    out.expect(rel_err(r.fitted_temperature_ratio, t.ratio) <= 0.10,
               r.label + " temperature ratio at -0.58 kappa " + fmt(r.fitted_temperature_ratio, 4) + " vs " +
                   fmt(t.ratio) + " (within 10%)");
    out.note(r.label + " frequency shift at -0.60 kappa from fitted params: " + fmt(r.fitted_shift_hz, 4) + " Hz");
  }
  return out;
}

// ---------------------------------------------------------------- AC-3

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// −K/m for an instantaneous thermal response, straight from the cavity
// response: 4ω·g0²|α|²·Δ(1+βA)/(κ² + Δ² − ω² + 2iκω).
std::complex<double> dispersive_stiffness(const SystemParams& p, double omega) {
  const double kappa = p.cavity.kappa().angular();
  const double delta = p.cavity.detuning();
  const double n = intracavity_photons(p.cavity, p.drive);
  const double g0 = p.g0();
  return 4.0 * omega * g0 * g0 * n * delta * (1.0 + p.coupling.beta_a()) /
         std::complex<double>(kappa * kappa + delta * delta - omega * omega, 2.0 * kappa * omega);
}

Outcome symmetry_limits() {
  Outcome out;
  bool zero = true;
  for (const auto& p : {cooling_mode(), heating_mode()}) {
    const auto z = p.with_detuning(0.0);
    zero = zero && delta_omega_m(z) == 0.0 && delta_gamma_m(z) == 0.0;
  }
  out.expect(zero, "delta_omega(0) = delta_gamma(0) = 0 exactly");

  double worst_odd = 0.0;
  for (const auto& base : {cooling_mode(), heating_mode()}) {
    for (double tau : {0.0, 1e-8, 600e-9, 1e-5}) {
      for (double d : {0.05, 0.3, 0.58, 1.0, 3.0}) {
        auto plus = base.with_detuning(d);
        auto minus = base.with_detuning(-d);
        plus.coupling.tau_t = minus.coupling.tau_t = tau;
        worst_odd = std::max({worst_odd, rel(delta_omega_m(plus), -delta_omega_m(minus)),
                              rel(delta_gamma_m(plus), -delta_gamma_m(minus))});
      }
    }
  }
  out.expect(worst_odd <= 1e-12, "odd symmetry in detuning, worst rel " + fmt(worst_odd, 3) + " <= 1e-12");

  double worst_limit = 0.0;
  for (const auto& base : {cooling_mode(), heating_mode()}) {
    for (double d : {-0.9, -0.58, 0.25}) {
      auto p = base.with_detuning(d);
      p.coupling.tau_t = 1e-18;
      const double w = p.mode.omega_m.angular();
      const auto k = dispersive_stiffness(p, w);
      worst_limit = std::max({worst_limit, rel(delta_omega_m(p), k.real() / (2.0 * w)), rel(delta_gamma_m(p), k.imag() / w)});
    }
  }
  out.expect(worst_limit <= 1e-9, "tau_t -> 0 equals dispersive shifts with g0^2 (1 + betaA), worst rel " +
                                      fmt(worst_limit, 3) + " <= 1e-9");

  // Kernel (1/τ)e^{−t/τ} sampled at τ/1e4 with a trapezoid end weight, against 1/(1 + iωτ).
  const double tau = reference::tau_t_s;
  const double dt = tau / 1e4;
  const std::size_t n = std::size_t{1} << 19;
  RealFft fft(n);
  auto in = fft.real();
  for (std::size_t i = 0; i < n; ++i) in[i] = std::exp(-static_cast<double>(i) * dt / tau) / tau * dt;
  in[0] *= 0.5;
  fft.forward();
  double worst_kernel = 0.0;
  for (std::size_t k = 0; k < fft.spectrum_size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k) / (static_cast<double>(n) * dt);
    if (w > 10.0 / tau) break;
    const std::complex<double> closed = 1.0 / std::complex<double>(1.0, w * tau);
    worst_kernel = std::max(worst_kernel, std::abs(fft.spectrum()[k] - closed) / std::abs(closed));
    PhotothermalCoupling unit{1.0, 1.0, 1.0, tau};
    worst_kernel = std::max(worst_kernel, std::abs(photothermal_filter(unit, w) - 1.0 - closed) / std::abs(closed));
  }
  out.expect(worst_kernel <= 1e-6, "kernel FFT vs 1/(1 + i omega tau), worst rel " + fmt(worst_kernel, 3) + " <= 1e-6");
  return out;
}

// ---------------------------------------------------------------- AC-4

Outcome fluctuation_dissipation() {
  Outcome out;
  SimConfig c;
  c.params = thermal_mode();
  c.sample_rate = 10e6;
  c.duration = 200.0 / c.params.mode.gamma_m.hz();
  c.seed = 1;
  const auto ts = thermal_spectrum(c);
  const double g_err = rel_err(ts.fit.gamma, c.params.mode.gamma_m.hz());
  out.expect(g_err <= 0.10, "Gamma_m " + fmt(ts.fit.gamma, 5) + " Hz vs 106 Hz (rel " + fmt(g_err, 3) + " <= 0.10)");
  const double f_err = std::abs(ts.fit.f_m - c.params.mode.omega_m.hz());
  out.expect(f_err <= 1.0, "f_m " + fmt(ts.fit.f_m, 10) + " Hz, |error| " + fmt(f_err, 3) + " Hz <= 1 Hz (fit sigma " +
                               fmt(ts.fit.f_m_err, 3) + " Hz)");
  const double a_err = rel_err(ts.fit.area, ts.equipartition_variance);
  out.expect(a_err <= 0.05, "area " + fmt(ts.fit.area, 5) + " m^2 vs kT/k " + fmt(ts.equipartition_variance, 5) +
                                " (rel " + fmt(a_err, 3) + " <= 0.05)");
  out.note(std::to_string(c.sample_count()) + " samples at " + fmt(c.sample_rate) + " Hz, " +
           std::to_string(ts.psd.segment_count) + " Welch segments");
  return out;
}

// ---------------------------------------------------------------- AC-5

Outcome tracking() {
  Outcome out;
  TrackingOptions opt;
  opt.thermal_linewidth_times = 0.0;
  const auto fig = reproduce_tracking_figure(opt);
  std::string plateau;
  for (const auto& p : fig.snr_plateau) plateau += fmt(p.snr_db, 4) + " ";
  out.expect(fig.plateau_spread_db <= 1.5, "plateau SNR [" + plateau + "] dB, max deviation " +
                                               fmt(fig.plateau_spread_db, 3) + " dB <= 1.5");
  out.expect(std::abs(fig.slope_db_per_decade - 10.0) <= 2.0,
             "short-time slope " + fmt(fig.slope_db_per_decade, 4) + " dB/decade, 10 +- 2");
  const double ratio = fig.track.ratio();
  out.expect(ratio >= 4.0 && ratio <= 9.0, "thermal_std/measurement_std " + fmt(ratio, 4) + " in [4, 9] over " +
                                               std::to_string(fig.track.size()) + " points");
  const auto& st = fig.statistics;
  const double zx = std::abs(st.kurtosis_x) / st.kurtosis_se;
  const double zy = std::abs(st.kurtosis_y) / st.kurtosis_se;
  out.expect(zx < 3.0 && zy < 3.0, "excess kurtosis X " + fmt(st.kurtosis_x, 3) + " (" + fmt(zx, 3) + " sigma), Y " +
                                       fmt(st.kurtosis_y, 3) + " (" + fmt(zy, 3) + " sigma), < 3 sigma");
  out.note("bin time " + fmt(fig.demod.bin_time * 1e3, 4) + " ms, decorrelation time of X " +
           fmt(fig.decorrelation_time * 1e3, 4) + " ms");
  return out;
}

// ---------------------------------------------------------------- AC-6

Outcome energy_ratio() {
  Outcome out;
  struct Run {
    const char* label;
    SystemParams params;
    double duration;
    double rate;
    double target;
  };
  for (const auto& r : {Run{"heating", heating_mode(), 5.0, 10e6, 2.8}, Run{"cooling", cooling_mode(), 2.0, 12e6, 0.25}}) {
    const auto e = simulated_energy_ratio(r.params, r.duration, r.rate, 1);
    const double err = rel_err(e.measured, r.target);
    out.expect(err <= 0.10, std::string(r.label) + " energy ratio " + fmt(e.measured, 4) + " vs " + fmt(r.target) +
                                " (rel " + fmt(err, 3) + " <= 0.10; model " + fmt(e.expected, 4) + ")");
  }
  return out;
}

// ---------------------------------------------------------------- AC-7

Outcome power_laws() {
  Outcome out;
  const auto fig = reproduce_power_law_figure(1);
  for (const auto& s : fig.series) {
    const auto& f = s.clean_fit;
    const double worst = std::max({rel_err(f.a, s.a), rel_err(f.b, s.b), rel_err(f.c, s.c)});
    out.expect(worst <= 1e-3, s.label + " noiseless (" + fmt(f.a, 5) + ", " + fmt(f.b, 5) + ", " + fmt(f.c, 5) +
                                  ") worst rel " + fmt(worst, 3) + " <= 1e-3");
    const auto& n = s.noisy_fit;
    const double za = std::abs(n.a - s.a) / n.a_err, zb = std::abs(n.b - s.b) / n.b_err,
                 zc = std::abs(n.c - s.c) / n.c_err;
    out.expect(za <= 3.0 && zb <= 3.0 && zc <= 3.0,
               s.label + " 5% noise: b " + fmt(n.b, 4) + " +- " + fmt(n.b_err, 3) + ", z (a, b, c) = (" + fmt(za, 3) +
                   ", " + fmt(zb, 3) + ", " + fmt(zc, 3) + ") <= 3");
  }
  return out;
}

// ---------------------------------------------------------------- AC-8

Outcome bath_model() {
  Outcome out;
  const double omega = thermal_mode().mode.omega_m.angular();
  double worst = 0.0, worst_allowed_ratio = 0.0;
  for (double t : {1e-6, 1e-3, 0.1, 0.53, 2.0, 300.0}) {
    const auto bath = detailed_balance_bath(t, omega, 1e-40);
    const double back = *bath_temperature(bath, omega);
    // ln(s+/s−) = ħω/kT is formed from rounded densities, so the round trip
    // is exact to a few ulps of the ratio, amplified by kT/ħω.
    const double x = constants::hbar * omega / (constants::k_B * t);
    const double allowed = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, 1.0 / x);
    worst = std::max(worst, rel_err(back, t));
    worst_allowed_ratio = std::max(worst_allowed_ratio, rel_err(back, t) / allowed);
  }
  out.expect(worst_allowed_ratio <= 1.0, "detailed balance T -> s+- -> T, worst rel " + fmt(worst, 3) +
                                             " (at most 8 ulp scaled by kT/hbar omega)");

  const bool no_bath = final_temperature(0.53, 100.0, 7.0, 0.0) == 0.53;
  const bool average = final_temperature(0.5, 1.0, 2.0, 1.0) == 1.25;
  out.expect(no_bath, "Gamma_B = 0 leaves T unchanged (exact)");
  out.expect(average, "equal-weight 0.5 K and 2 K gives 1.25 K (exact)");

  bool convex = true, heats_and_narrows = true;
  const double t0 = 0.5, g0 = 100.0;
  for (double tb : {0.1, 0.3, 1.0, 5.0}) {
    for (double gb : {1.0, 50.0, 400.0}) {
      const double tf = final_temperature(t0, g0, tb, gb);
      convex = convex && tf >= std::min(t0, tb) && tf <= std::max(t0, tb);
    }
  }
  for (double tb : {-5.0, -1.0, -0.1}) {
    for (double gb : {-10.0, -50.0, -90.0}) {
      const double tf = final_temperature(t0, g0, tb, gb);
      heats_and_narrows = heats_and_narrows && tf > t0 && g0 + gb < g0;
    }
  }
  // Inverted densities: s− > s+ gives T_B < 0 and Γ_B < 0.
  const auto mode = thermal_mode().mode;
  const NonEquilibriumBath inverted{1.0e-42, 1.5e-42};
  const double gb = bath_coupling(inverted, mode);
  const double tf = final_temperature(mode.temperature, inverted, mode);
  heats_and_narrows = heats_and_narrows && *bath_temperature(inverted, mode.omega_m.angular()) < 0.0 && gb < 0.0 &&
                      tf > mode.temperature;
  out.expect(convex, "Gamma_B > 0: T_final between T and T_B on the grid");
  out.expect(heats_and_narrows, "T_B < 0 with Gamma_B < 0: mode heats while the linewidth narrows (grid and densities)");
  bool unstable = false;
  try {
    final_temperature(t0, g0, -1.0, -150.0);
  } catch (const InstabilityError&) {
    unstable = true;
  }
  out.expect(unstable, "Gamma_0 + Gamma_B <= 0 reported as unstable");
  return out;
}

// ---------------------------------------------------------------- AC-9

int run_command(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome manifest_replay(const Context& ctx) {
  Outcome out;
  if (ctx.cli.empty()) {
    out.expect(false, "no CLI binary given (--cli PATH)");
    return out;
  }
  const fs::path root =
      ctx.keep.empty() ? fs::temp_directory_path() / ("sfom-ac9-" + std::to_string(::getpid())) : fs::path(ctx.keep);
  fs::remove_all(root);
  fs::create_directories(root);

  RunConfig cooling{cooling_mode(), 1};
  RunConfig fast{reference_system(), 3};
  fast.params.mode = {Frequency::from_hz(50e3), Frequency::from_hz(500.0), reference::m_eff_kg, reference::temperature_k};
  std::ofstream(root / "cooling.cfg") << format_config(cooling);
  std::ofstream(root / "fast.cfg") << format_config(fast);
  {
    std::ofstream sweep(root / "sweep.csv");
    std::vector<std::vector<double>> rows;
    const auto d = linspace(-1.0, 0.0, 21);
    for (const auto& s : synthetic_sweep(cooling.params, d, 0.05, 2)) {
      rows.push_back({s.detuning_over_kappa, s.gamma / kTwoPi, s.gamma_err / kTwoPi, s.delta_omega / kTwoPi,
                      s.delta_omega_err / kTwoPi});
    }
    const std::vector<std::string> header{"detuning_over_kappa", "gamma_hz", "gamma_err_hz", "domega_hz", "domega_err_hz"};
    write_csv(sweep, header, rows);
  }
  {
    std::ofstream power(root / "power.csv");
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 12; ++i) {
      const double p = 7e-9 * std::pow(250.0 / 7.0, i / 11.0);
      const double v = 16.0 * std::pow(p * 1e9, 0.38) + 19.3;
      rows.push_back({p, v * (1.0 + 0.01 * std::sin(3.0 * i)), 0.01 * v});
    }
    const std::vector<std::string> header{"power_w", "value", "err"};
    write_csv(power, header, rows);
  }

  const std::string cli = quote(ctx.cli);
  const auto cfg = [&](const char* name) { return quote(root / name); };
  const fs::path trace = root / "simulate" / "trace.csv";
  struct Invocation {
    std::string name;
    std::string args;
  };
  const std::vector<Invocation> runs{
      {"film", "film --thickness-nm 10 --fraction 1 --length-m 1e-4 --zeta 2.404825557695773,3.831705970207512"},
      {"bath", "bath --temperature 0.53 --gamma0-hz 106 --tb 2 --gamma-b-hz 50"},
      {"bath-densities", "bath --config " + cfg("fast.cfg") + " --temperature 0.53 --s-plus 1e-42 --s-minus 1.5e-42"},
      {"backaction", "backaction --config " + cfg("cooling.cfg") + " --sweep -1:0:41"},
      {"fit-sweep", "fit-sweep --config " + cfg("cooling.cfg") + " --input " + quote(root / "sweep.csv")},
      {"simulate", "simulate --config " + cfg("fast.cfg") + " --duration 0.1 --rate 1.2e6 --seed 7 --shot-floor 1e-27"},
      {"analyze", "analyze --input " + quote(trace) + " --segment 16384 --band 45000:55000"},
      {"track", "track --config " + cfg("fast.cfg") + " --input " + quote(trace) +
                    " --fm 50000 --bin-time 5e-4 --lp-bw 2000 --shot-floor 1e-27"},
      {"fit-power", "fit-power --input " + quote(root / "power.csv")},
      {"repro-fig4", "repro fig4 --seed 1"},
      {"repro-si-fig2", "repro si-fig2 --seed 1"},
  };
  for (const auto& r : runs) {
    const fs::path first = root / r.name;
    const fs::path second = root / (r.name + ".replay");
    const int rc = run_command(cli + " " + r.args + " --out " + quote(first));
    if (rc != 0) {
      out.expect(false, r.name + ": run exited with " + std::to_string(rc));
      continue;
    }
    const int rc2 = run_command(cli + " replay --manifest " + quote(first / "manifest.json") + " --out " + quote(second));
    std::size_t files = 0, identical = 0;
    for (const auto& entry : fs::directory_iterator(first)) {
      if (entry.path().filename() == "manifest.json") continue;
      ++files;
      const fs::path twin = second / entry.path().filename();
      if (fs::exists(twin) && slurp(entry.path()) == slurp(twin)) ++identical;
    }
    out.expect(rc2 == 0 && files > 0 && identical == files,
               r.name + ": replay exit " + std::to_string(rc2) + ", " + std::to_string(identical) + "/" +
                   std::to_string(files) + " outputs byte-identical");
  }
  if (ctx.keep.empty()) fs::remove_all(root);
  return out;
}

std::vector<Criterion> criteria() {
  return {
      {"AC-1", "third-sound speed", 1.0, [](const Context&) { return third_sound(); }},
      {"AC-2", "detuning-sweep fits", 10.0, [](const Context&) { return sweep_reproduction(); }},
      {"AC-3", "symmetry and limits", 5.0, [](const Context&) { return symmetry_limits(); }},
      {"AC-4", "fluctuation-dissipation", 30.0, [](const Context&) { return fluctuation_dissipation(); }},
      {"AC-5", "phase-space tracking", 60.0, [](const Context&) { return tracking(); }},
      {"AC-6", "simulated energy ratio", 60.0, [](const Context&) { return energy_ratio(); }},
      {"AC-7", "power-law fits", 5.0, [](const Context&) { return power_laws(); }},
      {"AC-8", "bath model", 5.0, [](const Context&) { return bath_model(); }},
      {"AC-9", "manifest replay", 30.0, manifest_replay},
  };
}

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  Context ctx;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else if (arg == "--cli" && i + 1 < argc) {
      ctx.cli = argv[++i];
    } else if (arg == "--keep" && i + 1 < argc) {
      ctx.keep = argv[++i];
    } else {
      std::cerr << "usage: sfom_acceptance [--only AC-N] [--cli PATH] [--keep DIR]\n";
      return 2;
    }
  }

  bool all = true;
  bool any = false;
  for (const auto& c : criteria()) {
    if (!only.empty() && c.id != only) continue;
    any = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome result;
    try {
      result = c.run(ctx);
    } catch (const std::exception& e) {
      result.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed <= c.runtime_limit_s;
    const bool pass = result.pass && in_time;
    all = all && pass;
    std::cout << c.id << ' ' << (pass ? "PASS" : "FAIL") << "  " << c.title << "  (" << fmt(elapsed, 3) << " s, limit "
              << fmt(c.runtime_limit_s) << " s" << (in_time ? "" : ", OVER LIMIT") << ")\n";
    for (const auto& line : result.lines) std::cout << "    " << line << '\n';
  }
  if (!any) {
    std::cerr << "no criterion matches '" << only << "'\n";
    return 2;
  }
  return all ? 0 : 1;
}
