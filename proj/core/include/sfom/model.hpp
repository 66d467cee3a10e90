#pragma once

// Physical parameters shared by every module. Frequencies are stored in hertz
// (the unit used on every file and command line) and handed to the physics in
// rad/s through Frequency::angular().

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sfom {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J/K
inline constexpr double c = 299792458.0;         // m/s
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Raised when a parameter violates its documented domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A frequency or rate. `hz()` is the cyclic value, `angular()` the value in rad/s.
class Frequency {
 public:
  constexpr Frequency() = default;

  static constexpr Frequency from_hz(double hz) { return Frequency(hz); }
  static constexpr Frequency from_angular(double rad_per_s) {
    return Frequency(rad_per_s / constants::two_pi);
  }

  constexpr double hz() const { return hz_; }
  constexpr double angular() const { return constants::two_pi * hz_; }

  friend constexpr Frequency operator+(Frequency a, Frequency b) { return Frequency(a.hz_ + b.hz_); }
  friend constexpr bool operator==(Frequency, Frequency) = default;

 private:
  constexpr explicit Frequency(double hz) : hz_(hz) {}
  double hz_ = 0.0;
};

/// The third-sound oscillator.
struct MechanicalMode {
  Frequency omega_m;     // resonance
  Frequency gamma_m;     // intrinsic energy decay rate
  double m_eff = 0.0;    // kg
  double temperature = 0.0;  // K, bath temperature

  void validate() const;

  double quality_factor() const { return omega_m.hz() / gamma_m.hz(); }
  double spring_constant() const { return m_eff * omega_m.angular() * omega_m.angular(); }
  /// k_B T / k.
  double thermal_variance() const;

  friend bool operator==(const MechanicalMode&, const MechanicalMode&) = default;
};

struct OpticalCavity {
  Frequency kappa_in;
  Frequency kappa_0;
  double detuning_over_kappa = 0.0;  // negative is red detuned

  void validate() const;

  Frequency kappa() const { return kappa_in + kappa_0; }
  /// Effective detuning Δ in rad/s (static displacement already absorbed).
  double detuning() const { return detuning_over_kappa * kappa().angular(); }

  friend bool operator==(const OpticalCavity&, const OpticalCavity&) = default;
};

struct DriveField {
  double power = 0.0;       // W, launched
  double wavelength = 0.0;  // m

  void validate() const;

  /// |α_in|² in photons per second.
  double photon_flux() const;

  friend bool operator==(const DriveField&, const DriveField&) = default;
};

struct PhotothermalCoupling {
  double g_hz_per_m = 0.0;  // g/2π
  double beta = 0.0;        // may be negative
  double absorption = 0.0;  // A in [0, 1]
  double tau_t = 0.0;       // s

  void validate() const;

  double g() const { return constants::two_pi * g_hz_per_m; }
  double beta_a() const { return beta * absorption; }

  friend bool operator==(const PhotothermalCoupling&, const PhotothermalCoupling&) = default;
};

struct SystemParams {
  MechanicalMode mode;
  OpticalCavity cavity;
  DriveField drive;
  PhotothermalCoupling coupling;

  void validate() const;

  /// g0 = g·x_zpf in rad/s.
  double g0() const;

  SystemParams with_detuning(double detuning_over_kappa) const {
    SystemParams p = *this;
    p.cavity.detuning_over_kappa = detuning_over_kappa;
    return p;
  }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Steady-state intracavity amplitude α = sqrt(2κ_in)·α_in/(κ − iΔ), in sqrt(photon) units.
std::complex<double> intracavity_amplitude(const OpticalCavity& cavity, const DriveField& drive);

/// |α|², the mean intracavity photon number.
double intracavity_photons(const OpticalCavity& cavity, const DriveField& drive);

/// sqrt(ħ / (2 m_eff ω_m)).
double zero_point_motion(const MechanicalMode& mode);

}  // namespace sfom
