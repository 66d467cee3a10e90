#pragma once

// Superfluid film: third-sound speed and confined-mode frequencies, the
// non-equilibrium bath model, and power-law fits of power-dependent data.

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sfom/model.hpp"

namespace sfom {

struct SuperfluidFilm {
  double thickness_nm = 10.0;
  double superfluid_fraction = 1.0;  // ρ_s/ρ
  double alpha_vdw = 2.65e21;        // nm⁵/s², helium on silica

  void validate() const;
};

/// sqrt(3·(ρ_s/ρ)·α_vdw/d³), in m/s.
double third_sound_speed(const SuperfluidFilm& film);

/// ζ·c_s/(2π·L) in Hz, for a geometric eigenvalue ζ and length scale L (m).
double mode_frequency(const SuperfluidFilm& film, double length_m, double zeta);

/// Zeros j_{n,k} of the Bessel function J_n, the eigenvalues ζ of a clamped
/// circular membrane (ζ = j_{n,k}, L = radius). Reference data only: nothing
/// here ties third-sound modes to this geometry.
struct BesselZero {
  int order;
  int index;
  double value;
};
std::vector<BesselZero> circular_membrane_zeros(int max_order, int zeros_per_order);

/// Force-noise spectral densities of the bath at ±ω_m, in N²·s.
struct NonEquilibriumBath {
  double s_plus = 0.0;
  double s_minus = 0.0;

  void validate() const;
};

/// Densities that satisfy detailed balance at temperature T:
/// s_plus/s_minus = exp(ħω/k_B T), with s_minus given.
NonEquilibriumBath detailed_balance_bath(double temperature, double omega, double s_minus);

/// T_B = ħω/(k_B·ln(s_plus/s_minus)), signed. nullopt marks an infinite
/// temperature (relative difference of the densities below 1e-12).
/// Throws InvalidParameter unless both densities are positive.
std::optional<double> bath_temperature(const NonEquilibriumBath& bath, double omega);

/// Γ_B = x_zpf²/ħ²·(s_plus − s_minus), signed, rad/s.
double bath_coupling(const NonEquilibriumBath& bath, const MechanicalMode& mode);

/// T_B·Γ_B = ω_m·x_zpf²·L(s_plus, s_minus)/(ħ·k_B), with L the logarithmic
/// mean. Finite and continuous through s_plus = s_minus.
double bath_heat_input(const NonEquilibriumBath& bath, const MechanicalMode& mode);

/// Raised when the total damping is not positive, so no steady state exists.
class InstabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// (T·Γ_0 + T_B·Γ_B)/(Γ_0 + Γ_B). Rates in any common unit.
double final_temperature(double temperature, double gamma_0, double bath_temperature, double bath_coupling);
/// Same, from the bath densities; handles the infinite-T_B case.
double final_temperature(double temperature, const NonEquilibriumBath& bath, const MechanicalMode& mode);

/// y = a·P^b + c.
struct PowerLawFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double a_err = 0.0, b_err = 0.0, c_err = 0.0;
  double residual_norm = 0.0;
  double reduced_chi2 = 0.0;
  std::size_t points = 0;

  double evaluate(double power) const;
};

/// Needs ≥ 4 points with positive powers. `errors` may be empty; if given,
/// all entries must be positive and are used as 1σ. Throws FitError.
PowerLawFit fit_power_law(std::span<const double> powers, std::span<const double> values,
                          std::span<const double> errors = {});

/// Measured mode frequency against temperature, read from a CSV with header
/// `temperature_k,frequency_hz`. Carried through for plotting only.
struct FrequencyTemperaturePoint {
  double temperature_k;
  double frequency_hz;
};
std::vector<FrequencyTemperaturePoint> read_frequency_temperature(const std::filesystem::path& path);

}  // namespace sfom
