#include "sfom/backaction.hpp"

#include <cmath>
#include <limits>

namespace sfom {

namespace {

using cplx = std::complex<double>;

struct Shifts {
  double delta_omega;
  double delta_gamma;
};

Shifts shifts(const SystemParams& params, double omega) {
  const double prefactor = backaction_prefactor(params, omega);
  if (prefactor == 0.0) return {0.0, 0.0};
  const double kappa = params.cavity.kappa().angular();
  const double delta = params.cavity.detuning();
  const double tau = params.coupling.tau_t;
  const double c = kappa * kappa + delta * delta - omega * omega;
  const double b = params.coupling.beta_a() / (1.0 + omega * omega * tau * tau);
  const double omega_m = params.mode.omega_m.angular();
  return {
      prefactor / (2.0 * omega_m) * (c * (1.0 + b) - 2.0 * kappa * omega * omega * tau * b),
      -prefactor * (c * tau * b + 2.0 * kappa * (1.0 + b)),
  };
}

}  // namespace

cplx cavity_response(const OpticalCavity& cavity, double omega) {
  return {cavity.kappa().angular(), omega - cavity.detuning()};
}

cplx cavity_pair_response(const OpticalCavity& cavity, double omega) {
  const double kappa = cavity.kappa().angular();
  const double delta = cavity.detuning();
  return {kappa * kappa + delta * delta - omega * omega, 2.0 * kappa * omega};
}

cplx bare_susceptibility(const MechanicalMode& mode, double omega) {
  const double wm = mode.omega_m.angular();
  return 1.0 / (mode.m_eff * cplx(wm * wm - omega * omega, omega * mode.gamma_m.angular()));
}

cplx photothermal_filter(const PhotothermalCoupling& coupling, double omega) {
  return 1.0 + coupling.beta_a() / cplx(1.0, omega * coupling.tau_t);
}

double backaction_prefactor(const SystemParams& params, double omega) {
  const double delta = params.cavity.detuning();
  const double photons = intracavity_photons(params.cavity, params.drive);
  if (delta == 0.0 || photons == 0.0) return 0.0;
  const double g0 = params.g0();
  return 4.0 * g0 * g0 * photons * params.mode.omega_m.angular() * delta /
         std::norm(cavity_pair_response(params.cavity, omega));
}

double delta_omega_m(const SystemParams& params, double omega) { return shifts(params, omega).delta_omega; }
double delta_omega_m(const SystemParams& params) { return delta_omega_m(params, params.mode.omega_m.angular()); }

double delta_gamma_m(const SystemParams& params, double omega) { return shifts(params, omega).delta_gamma; }
double delta_gamma_m(const SystemParams& params) { return delta_gamma_m(params, params.mode.omega_m.angular()); }

cplx effective_susceptibility(const SystemParams& params, double omega) {
  const auto [dw, dg] = shifts(params, params.mode.omega_m.angular());
  const double wm = params.mode.omega_m.angular();
  const double gamma = params.mode.gamma_m.angular() + dg;
  return 1.0 / (params.mode.m_eff * cplx(wm * wm + 2.0 * omega * dw - omega * omega, omega * gamma));
}

cplx photon_number_response(const SystemParams& params, double omega) {
  const double photons = intracavity_photons(params.cavity, params.drive);
  return -2.0 * photons * params.coupling.g() * params.cavity.detuning() /
         cavity_pair_response(params.cavity, omega);
}

BackactionPoint backaction_point(const SystemParams& params) {
  const auto [dw, dg] = shifts(params, params.mode.omega_m.angular());
  BackactionPoint p;
  p.detuning_over_kappa = params.cavity.detuning_over_kappa;
  p.delta_omega = dw;
  p.delta_gamma = dg;
  p.effective_gamma = params.mode.gamma_m.angular() + dg;
  p.temperature_ratio = p.effective_gamma > 0.0 ? params.mode.gamma_m.angular() / p.effective_gamma
                                                : std::numeric_limits<double>::quiet_NaN();
  return p;
}

std::vector<BackactionPoint> detuning_sweep(const SystemParams& params,
                                            std::span<const double> detunings_over_kappa) {
  std::vector<BackactionPoint> out;
  out.reserve(detunings_over_kappa.size());
  for (double d : detunings_over_kappa) {
    if (!std::isfinite(d)) throw InvalidParameter("detuning must be finite");
    out.push_back(backaction_point(params.with_detuning(d)));
  }
  return out;
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = start;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    // Endpoints exact; interior by interpolation so symmetric ranges stay symmetric.
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = i + 1 == count ? stop : start + (stop - start) * t;
  }
  return out;
}

}  // namespace sfom
