#pragma once

// Reference parameter sets used by the reproduction recipes, the acceptance
// suite and the example configs, plus helpers to synthesise sweep data and to
// set the measurement noise for a target signal-to-noise ratio.
//
// The cavity is κ/2π = 22.3 MHz at critical coupling driven with 200 nW at
// 1555.1 nm; m_eff = 1 fg and T = 0.53 K. Absorption and β are placeholders:
// only their product enters the model, and the coupling g is solved so the
// optical damping at the anchor detuning hits its target.

#include <cstdint>
#include <span>
#include <vector>

#include "sfom/backaction_fit.hpp"
#include "sfom/model.hpp"

namespace sfom {

namespace reference {
inline constexpr double kappa_hz = 22.3e6;
inline constexpr double power_w = 200e-9;
inline constexpr double wavelength_m = 1555.1e-9;
inline constexpr double m_eff_kg = 1e-15;
inline constexpr double temperature_k = 0.53;
inline constexpr double tau_t_s = 600e-9;
inline constexpr double beta_a = 100.0;
inline constexpr double absorption = 0.01;

/// Anchor detuning for the damping target, and for the frequency-shift readout.
inline constexpr double damping_detuning = -0.58;
inline constexpr double shift_detuning = -0.60;
}  // namespace reference

/// Cavity, drive and thermal environment shared by every reference mode, with
/// no coupling and the mode left at zero.
SystemParams reference_system();

/// g/2π (Hz/m) that makes δΓ/2π at the params' detuning equal `delta_gamma_hz`.
/// Throws InvalidParameter when the sign cannot be reached (δΓ has the fixed
/// sign of the backaction at unit coupling).
double coupling_for_damping(const SystemParams& params, double delta_gamma_hz);

/// 552.5 kHz mode, Γ_0/2π = 115 Hz, β·A = +100, broadened to 464 Hz at
/// Δ = −0.58κ (temperature ratio 0.25).
SystemParams cooling_mode();
/// 482 kHz mode, Γ_0/2π = 137 Hz, β·A = −100, narrowed to 49 Hz at
/// Δ = −0.58κ (temperature ratio 2.8).
SystemParams heating_mode();
/// 482 kHz mode, Γ_m/2π = 106 Hz, undriven.
SystemParams thermal_mode();

SweepFitFixed sweep_fixed(const SystemParams& params);

/// Model sweep at the params' drive: Γ = Γ_0 + δΓ and δω per detuning. With
/// noise_fraction > 0 each Γ gets Gaussian noise of σ = noise_fraction·Γ and
/// each δω of σ = noise_fraction·max|δω|; the σ are reported as errors.
std::vector<SweepSample> synthetic_sweep(const SystemParams& params, std::span<const double> detunings_over_kappa,
                                         double noise_fraction = 0.0, std::uint64_t seed = 1);

/// Double-sided white displacement floor that puts the thermal peak of `mode`
/// `snr_db` above the floor, SNR = (peak − floor)/floor in the single-sided PSD.
double shot_floor_for_snr(const MechanicalMode& mode, double snr_db);

}  // namespace sfom
