#include "sfom/model.hpp"

#include <cmath>

namespace sfom {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidParameter(what);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void MechanicalMode::validate() const {
  require(positive_finite(omega_m.hz()), "omega_m must be positive and finite");
  require(positive_finite(gamma_m.hz()), "gamma_m must be positive and finite");
  require(positive_finite(m_eff), "m_eff must be positive and finite");
  // T = 0 is allowed so that noiseless runs can be expressed.
  require(std::isfinite(temperature) && temperature >= 0.0, "temperature must be >= 0");
}

double MechanicalMode::thermal_variance() const {
  return constants::k_B * temperature / spring_constant();
}

void OpticalCavity::validate() const {
  require(positive_finite(kappa_in.hz()), "kappa_in must be positive and finite");
  require(std::isfinite(kappa_0.hz()) && kappa_0.hz() >= 0.0, "kappa_0 must be >= 0");
  require(std::isfinite(detuning_over_kappa), "detuning must be finite");
}

void DriveField::validate() const {
  require(std::isfinite(power) && power >= 0.0, "power must be >= 0");
  require(positive_finite(wavelength), "wavelength must be positive and finite");
}

double DriveField::photon_flux() const {
  return power * wavelength / (constants::two_pi * constants::hbar * constants::c);
}

void PhotothermalCoupling::validate() const {
  require(std::isfinite(g_hz_per_m), "g must be finite");
  require(std::isfinite(beta), "beta must be finite");
  require(std::isfinite(absorption) && absorption >= 0.0 && absorption <= 1.0,
          "absorption must lie in [0, 1]");
  require(std::isfinite(tau_t) && tau_t >= 0.0, "tau_t must be >= 0");
}

void SystemParams::validate() const {
  mode.validate();
  cavity.validate();
  drive.validate();
  coupling.validate();
}

double SystemParams::g0() const { return coupling.g() * zero_point_motion(mode); }

std::complex<double> intracavity_amplitude(const OpticalCavity& cavity, const DriveField& drive) {
  const double kappa = cavity.kappa().angular();
  const double alpha_in = std::sqrt(drive.photon_flux());
  const std::complex<double> denom(kappa, -cavity.detuning());
  return std::sqrt(2.0 * cavity.kappa_in.angular()) * alpha_in / denom;
}

double intracavity_photons(const OpticalCavity& cavity, const DriveField& drive) {
  const double kappa = cavity.kappa().angular();
  const double delta = cavity.detuning();
  return 2.0 * cavity.kappa_in.angular() * drive.photon_flux() / (kappa * kappa + delta * delta);
}

double zero_point_motion(const MechanicalMode& mode) {
  return std::sqrt(constants::hbar / (2.0 * mode.m_eff * mode.omega_m.angular()));
}

}  // namespace sfom
