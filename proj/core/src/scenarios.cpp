#include "sfom/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "sfom/backaction.hpp"
#include "sfom/random.hpp"
#include "sfom/spectral.hpp"

namespace sfom {

SystemParams reference_system() {
  SystemParams p;
  p.mode.m_eff = reference::m_eff_kg;
  p.mode.temperature = reference::temperature_k;
  p.cavity.kappa_in = Frequency::from_hz(reference::kappa_hz / 2.0);
  p.cavity.kappa_0 = Frequency::from_hz(reference::kappa_hz / 2.0);
  p.drive.power = reference::power_w;
  p.drive.wavelength = reference::wavelength_m;
  p.coupling.absorption = reference::absorption;
  p.coupling.tau_t = reference::tau_t_s;
  return p;
}

double coupling_for_damping(const SystemParams& params, double delta_gamma_hz) {
  SystemParams unit = params;
  unit.coupling.g_hz_per_m = 1.0;
  const double per_unit = delta_gamma_m(unit) / constants::two_pi;  // ∝ g²
  if (!(per_unit != 0.0) || !(delta_gamma_hz / per_unit > 0.0)) {
    throw InvalidParameter("target optical damping has the wrong sign for this detuning and beta*A");
  }
  return std::sqrt(delta_gamma_hz / per_unit);
}

namespace {

SystemParams anchored_mode(double f_m, double gamma_0, double beta_a, double gamma_target) {
  SystemParams p = reference_system();
  p.mode.omega_m = Frequency::from_hz(f_m);
  p.mode.gamma_m = Frequency::from_hz(gamma_0);
  p.coupling.beta = beta_a / reference::absorption;
  p.cavity.detuning_over_kappa = reference::damping_detuning;
  p.coupling.g_hz_per_m = coupling_for_damping(p, gamma_target - gamma_0);
  return p;
}

}  // namespace

SystemParams cooling_mode() { return anchored_mode(552.5e3, 115.0, reference::beta_a, 464.0); }

SystemParams heating_mode() { return anchored_mode(482e3, 137.0, -reference::beta_a, 49.0); }

SystemParams thermal_mode() {
  SystemParams p = reference_system();
  p.mode.omega_m = Frequency::from_hz(482e3);
  p.mode.gamma_m = Frequency::from_hz(106.0);
  p.drive.power = 0.0;
  return p;
}

SweepFitFixed sweep_fixed(const SystemParams& params) {
  return {params.cavity.kappa().angular(), params.mode.omega_m.angular(), params.mode.gamma_m.angular()};
}

std::vector<SweepSample> synthetic_sweep(const SystemParams& params, std::span<const double> detunings_over_kappa,
                                         double noise_fraction, std::uint64_t seed) {
  if (!(noise_fraction >= 0.0)) throw InvalidParameter("noise fraction must be >= 0");
  const auto points = detuning_sweep(params, detunings_over_kappa);
  double max_shift = 0.0;
  for (const auto& q : points) max_shift = std::max(max_shift, std::abs(q.delta_omega));
  NormalStream noise(seed, 0);
  std::vector<SweepSample> out;
  out.reserve(points.size());
  for (const auto& q : points) {
    SweepSample s;
    s.detuning_over_kappa = q.detuning_over_kappa;
    s.gamma = q.effective_gamma;
    s.delta_omega = q.delta_omega;
    if (noise_fraction > 0.0) {
      s.gamma_err = noise_fraction * std::abs(q.effective_gamma);
      s.delta_omega_err = noise_fraction * max_shift;
      s.gamma += s.gamma_err * noise();
      s.delta_omega += s.delta_omega_err * noise();
    }
    out.push_back(s);
  }
  return out;
}

double shot_floor_for_snr(const MechanicalMode& mode, double snr_db) {
  mode.validate();
  const double f_m = mode.omega_m.hz();
  const double gamma = mode.gamma_m.hz();
  const double peak = thermal_psd_amplitude(gamma, mode.m_eff, mode.temperature) / (f_m * f_m * gamma * gamma);
  return peak / (2.0 * std::pow(10.0, snr_db / 10.0));
}

}  // namespace sfom
