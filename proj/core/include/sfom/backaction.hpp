#pragma once

// Linear dynamical backaction of a detuned cavity on the mechanical mode,
// including a delayed photothermal force of relative strength β·A that acts
// through a single-pole thermal response with time constant τ_t.
//
// Fourier convention: x(t) = ∫ x(ω) e^{iωt}, so a first-order lag reads
// 1/(1 + iωτ). All angular quantities are rad/s.

#include <complex>
#include <span>
#include <vector>

#include "sfom/model.hpp"

namespace sfom {

/// D(ω) = κ + i(ω − Δ).
std::complex<double> cavity_response(const OpticalCavity& cavity, double omega);

/// D(ω)·conj(D(−ω)) = (κ² + Δ² − ω²) + 2iκω.
std::complex<double> cavity_pair_response(const OpticalCavity& cavity, double omega);

/// χ(ω) = 1/(m_eff(ω_m² − ω² + iωΓ_m)).
std::complex<double> bare_susceptibility(const MechanicalMode& mode, double omega);

/// 1 + β·A/(1 + iωτ_t).
std::complex<double> photothermal_filter(const PhotothermalCoupling& coupling, double omega);

/// 4·g0²·|α|²·ω_m·Δ / |D(ω)D*(−ω)|². Dimensionless, odd in Δ.
double backaction_prefactor(const SystemParams& params, double omega);

/// Optical-spring shift. Evaluated at the bare ω_m unless `omega` is given.
double delta_omega_m(const SystemParams& params, double omega);
double delta_omega_m(const SystemParams& params);

/// Optical damping. Positive values broaden (and cool) the mode.
double delta_gamma_m(const SystemParams& params, double omega);
double delta_gamma_m(const SystemParams& params);

/// χ′(ω) = 1/(m_eff(ω_m² + 2ωδω_m − ω² + iω(Γ_m + δΓ_m))), shifts taken at ω_m.
/// The pulling term is 2ω·δω_m as written in the model; 2ω_m·δω_m differs only
/// at order δω_m·(ω − ω_m).
std::complex<double> effective_susceptibility(const SystemParams& params, double omega);

/// Intracavity photon-number response δn(ω)/δx(ω) = −2|α|²gΔ / (D(ω)D*(−ω)), in 1/m.
/// The radiation-pressure force is ħg·δn; the photothermal force adds the
/// filtered copy, so the total force per displacement is ħg·(this)·photothermal_filter.
std::complex<double> photon_number_response(const SystemParams& params, double omega);

struct BackactionPoint {
  double detuning_over_kappa = 0.0;
  double delta_omega = 0.0;      // rad/s
  double delta_gamma = 0.0;      // rad/s
  double effective_gamma = 0.0;  // rad/s
  /// Γ_m/Γ_eff, or NaN when Γ_eff ≤ 0 (past the instability threshold).
  double temperature_ratio = 0.0;

  bool stable() const { return effective_gamma > 0.0; }
};

BackactionPoint backaction_point(const SystemParams& params);

/// Evaluates the shifts at each Δ/κ at fixed launched power, so |α|² is
/// recomputed per point.
std::vector<BackactionPoint> detuning_sweep(const SystemParams& params,
                                            std::span<const double> detunings_over_kappa);

/// `count` evenly spaced values from `start` to `stop` inclusive.
std::vector<double> linspace(double start, double stop, std::size_t count);

}  // namespace sfom
