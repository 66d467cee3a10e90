#include <cmath>
#include <iostream>
#include <numbers>

#include "commands.hpp"
#include "sfom/reproduce.hpp"
#include "sfom/scenarios.hpp"

namespace sfom::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Json checks_json(const std::vector<Check>& checks) {
  Json array = Json::array();
  for (const auto& c : checks) {
    array.push_back({{"name", c.name}, {"value", number_or_null(c.value)}, {"lo", c.lo}, {"hi", c.hi}, {"pass", c.pass()}});
  }
  return {{"all_pass", all_pass(checks)}, {"checks", std::move(array)}};
}

void finish_checks(const std::string& figure, const std::vector<Check>& checks, OutputDir& out) {
  out.write_json("checks.json", checks_json(checks));
  for (const auto& c : checks) {
    std::cout << (c.pass() ? "pass " : "FAIL ") << c.name << " = " << c.value << "  [" << c.lo << ", " << c.hi << "]\n";
  }
  if (!all_pass(checks)) throw CheckFailed(figure + ": one or more checks failed");
}

Json sweep_fit_json(const BackactionFit& f) {
  return {{"beta_times_a", f.beta_times_a},
          {"beta_times_a_err", f.beta_times_a_err},
          {"tau_t_s", f.tau_t},
          {"tau_t_err_s", f.tau_t_err},
          {"coupling_scale_rad2_per_s2", f.coupling_scale},
          {"coupling_scale_fixed", f.coupling_scale_fixed},
          {"reduced_chi2", number_or_null(f.reduced_chi2)},
          {"points", f.points}};
}

void repro_sweeps(const Invocation& inv, OutputDir& out) {
  const auto fig = reproduce_sweep_figure(inv.seed);
  for (const auto* rep : {&fig.cooling, &fig.heating}) {
    const auto fixed = sweep_fixed(rep->params);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rep->detunings.size(); ++i) {
      const auto& m = rep->model[i];
      const auto& s = rep->noisy[i];
      const auto f = sweep_model(fixed, rep->noisy_fit.params(), rep->detunings[i]);
      rows.push_back({rep->detunings[i], (fixed.gamma_0 + m.delta_gamma) / kTwoPi, m.delta_omega / kTwoPi,
                      s.gamma / kTwoPi, s.gamma_err / kTwoPi, s.delta_omega / kTwoPi, s.delta_omega_err / kTwoPi,
                      (fixed.gamma_0 + f.delta_gamma) / kTwoPi, f.delta_omega / kTwoPi});
    }
    out.write_table("sweep_" + rep->label,
                    {"detuning_over_kappa", "model_gamma_hz", "model_domega_hz", "gamma_hz", "gamma_err_hz", "domega_hz",
                     "domega_err_hz", "fit_gamma_hz", "fit_domega_hz"},
                    rows, inv.format);
    Json j;
    j["label"] = rep->label;
    j["noiseless"] = sweep_fit_json(rep->clean_fit);
    j["noisy"] = sweep_fit_json(rep->noisy_fit);
    j["temperature_ratio_at_damping_anchor"] = number_or_null(rep->fitted_temperature_ratio);
    j["domega_hz_at_shift_anchor"] = rep->fitted_shift_hz;
    out.write_json("fit_" + rep->label + ".json", j);
  }
  finish_checks("fig4", fig.checks, out);
}

void repro_tracking(const Invocation& inv, OutputDir& out) {
  TrackingOptions opt;
  opt.seed = inv.seed;
  opt.sample_rate = inv.number("rate");
  opt.snr_db = inv.number("snr-db");
  opt.track_points = inv.count("track-points");
  opt.thermal_linewidth_times = inv.number("thermal-times");
  const auto fig = reproduce_tracking_figure(opt);
  const double f_m = fig.params.mode.omega_m.hz();

  for (const auto& [name, pts] : {std::pair{"snr_plateau", &fig.snr_plateau}, std::pair{"snr_slope", &fig.snr_slope}}) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : *pts) rows.push_back({p.duration, p.snr_db, static_cast<double>(p.chunks)});
    out.write_table(name, {"duration_s", "snr_db", "chunks"}, rows, inv.format);
  }
  {
    std::vector<std::vector<double>> rows;
    const auto& psd = fig.homodyne_psd;
    for (std::size_t k = 0; k < psd.values.size(); ++k) {
      if (std::abs(psd.frequencies[k] - f_m) <= 500e3) rows.push_back({psd.frequencies[k], psd.values[k]});
    }
    out.write_table("homodyne_psd", {"freq_hz", "psd"}, rows, inv.format);
  }
  if (opt.thermal_linewidth_times > 0.0) {
    const auto& th = fig.thermal;
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < th.psd.values.size(); ++k) {
      const double f = th.psd.frequencies[k];
      if (std::abs(f - f_m) <= 20.0 * fig.params.mode.gamma_m.hz()) rows.push_back({f, th.psd.values[k], th.fit.evaluate(f)});
    }
    out.write_table("thermal_psd", {"freq_hz", "psd", "fit"}, rows, inv.format);
    out.write_json("thermal_fit.json", {{"f_m_hz", th.fit.f_m},
                                        {"gamma_hz", th.fit.gamma},
                                        {"area", th.fit.area},
                                        {"equipartition_variance", th.equipartition_variance},
                                        {"f_m_err_hz", th.fit.f_m_err},
                                        {"gamma_err_hz", th.fit.gamma_err},
                                        {"area_err", th.fit.area_err}});
  }
  {
    std::vector<std::vector<double>> rows;
    const auto& t = fig.track;
    for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({t.times[i], t.x[i], t.y[i]});
    out.write_table("track", {"t_s", "x_quad_m", "y_quad_m"}, rows, inv.format);
  }
  const auto& st = fig.statistics;
  Json radial = Json::array();
  for (std::size_t b = 0; b < st.radial_counts.size(); ++b) {
    radial.push_back({{"r_lo", st.radial_edges[b]}, {"r_hi", st.radial_edges[b + 1]}, {"count", st.radial_counts[b]}});
  }
  out.write_json("track_stats.json", {{"points", fig.track.size()},
                                      {"bin_time_s", fig.demod.bin_time},
                                      {"lp_bandwidth_hz", fig.demod.lp_bandwidth},
                                      {"shot_noise_floor_m2_per_hz", fig.shot_noise_floor},
                                      {"thermal_std", fig.track.thermal_std},
                                      {"measurement_std", fig.track.measurement_std},
                                      {"ratio", fig.track.ratio()},
                                      {"kurtosis_x", st.kurtosis_x},
                                      {"kurtosis_y", st.kurtosis_y},
                                      {"kurtosis_se", st.kurtosis_se},
                                      {"decorrelation_time_s", fig.decorrelation_time},
                                      {"plateau_mean_db", fig.plateau_mean_db},
                                      {"slope_db_per_decade", fig.slope_db_per_decade},
                                      {"radial_histogram", std::move(radial)}});
  finish_checks("fig3", fig.checks, out);
}

void repro_power_laws(const Invocation& inv, OutputDir& out) {
  const auto fig = reproduce_power_law_figure(inv.seed);
  Json fits = Json::array();
  for (const auto& s : fig.series) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.powers_nw.size(); ++i) {
      const double p = s.powers_nw[i];
      rows.push_back({p, s.clean[i], s.noisy[i], s.errors[i], s.clean_fit.evaluate(p), s.noisy_fit.evaluate(p)});
    }
    out.write_table("power_law_" + s.label, {"power_nw", "clean", "noisy", "err", "clean_fit", "noisy_fit"}, rows,
                    inv.format);
    const auto fit_json = [](const PowerLawFit& f) {
      return Json{{"a", f.a}, {"b", f.b}, {"c", f.c}, {"a_err", f.a_err}, {"b_err", f.b_err}, {"c_err", f.c_err}};
    };
    fits.push_back({{"label", s.label},
                    {"generating", {{"a", s.a}, {"b", s.b}, {"c", s.c}}},
                    {"noiseless", fit_json(s.clean_fit)},
                    {"noisy", fit_json(s.noisy_fit)}});
  }
  out.write_json("fits.json", {{"power_unit", "nW"}, {"series", std::move(fits)}});
  finish_checks("si-fig2", fig.checks, out);
}

}  // namespace

void run_repro(const Invocation& inv, OutputDir& out) {
  const auto& figure = inv.text("figure");
  if (figure == "fig4") return repro_sweeps(inv, out);
  if (figure == "fig3") return repro_tracking(inv, out);
  if (figure == "si-fig2") return repro_power_laws(inv, out);
  throw UsageError("unknown figure '" + figure + "'; expected fig3, fig4 or si-fig2");
}

}  // namespace sfom::cli
