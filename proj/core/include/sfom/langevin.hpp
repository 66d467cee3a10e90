#pragma once

// Time-domain simulation of the linearised oscillator-cavity-photothermal
// system driven by thermal force noise, with displacement-equivalent shot
// noise added at the output.
//
// The dynamics are linear with additive noise, so each step of length dt is
// propagated exactly: s ← Φ·s + L·ξ with Φ = exp(M·dt) and L·Lᵀ the exact
// one-step noise covariance (Van Loan). This has no step-size error and no
// numerical damping. The run starts from the stationary distribution when the
// drift is stable, and from the bare thermal state otherwise.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "sfom/model.hpp"

namespace sfom {

enum class CavityModel {
  /// Cavity follows x instantly: the photon response is taken at ω_m, so the
  /// radiation-pressure and photothermal forces reproduce δω_m and δΓ_m exactly
  /// at ω_m. The thermal lag is kept as an explicit state.
  Adiabatic,
  /// Integrates the cavity fluctuation quadratures explicitly.
  FullCavity,
};

const char* to_string(CavityModel model);
CavityModel parse_cavity_model(std::string_view text);

struct SimConfig {
  SystemParams params;
  double duration = 0.0;     // s
  double sample_rate = 0.0;  // Hz
  std::uint64_t seed = 1;
  CavityModel model = CavityModel::Adiabatic;
  double shot_noise_floor = 0.0;  // double-sided displacement PSD, m²/Hz

  /// Throws InvalidParameter, including when the rate does not resolve the
  /// fastest time scale (20·f_m adiabatic, 20·κ/2π full cavity).
  void validate() const;
  std::size_t sample_count() const;
  double min_sample_rate() const;
};

struct SimState {
  double x = 0.0;     // m
  double v = 0.0;     // m/s
  double y_pt = 0.0;  // photothermal state, photons
  double a_re = 0.0;  // full-cavity mode only
  double a_im = 0.0;
};

struct SimTrace {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> x;
  std::vector<double> homodyne;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  /// Set when the integration produced a non-finite value; the trace then
  /// ends at the last finite sample.
  bool unstable = false;

  double sample_rate() const { return 1.0 / dt; }
  std::size_t size() const { return x.size(); }
};

/// sqrt(2·Γ_m·m_eff·k_B·T), the white force-noise strength in N·s^½.
double thermal_force_amplitude(const MechanicalMode& mode);

/// FNV-1a over the canonical text of every field of the config, seed included.
std::uint64_t config_hash(const SimConfig& config);

/// Streaming simulator. Samples are produced in order with next_block; the
/// concatenation of blocks is independent of how the run is split.
class Simulator {
 public:
  explicit Simulator(const SimConfig& config);
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  /// Fills up to min(x.size(), remaining()) samples and returns the count.
  /// `homodyne` must be at least as long as `x` (or empty to skip it).
  /// Returns fewer samples if the state becomes non-finite.
  std::size_t next_block(std::span<double> x, std::span<double> homodyne);

  std::size_t produced() const;
  std::size_t remaining() const;
  bool unstable() const;
  /// True when the continuous drift has an eigenvalue with Re ≥ 0.
  bool linearly_unstable() const;

  SimState state() const;
  void set_state(const SimState& state);

  /// Continuous drift matrix in physical units (row-major, dim × dim) and the
  /// ordering of its state vector.
  std::vector<double> drift_matrix() const;
  std::size_t dimension() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SimTrace simulate(const SimConfig& config);

class ReplayMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Re-runs a configuration after checking it hashes to `expected_hash`.
SimTrace replay(const SimConfig& config, std::uint64_t expected_hash);

}  // namespace sfom
