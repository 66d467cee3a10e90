#pragma once

// Least-squares fit of measured detuning sweeps (linewidth and frequency shift
// versus Δ/κ) to the backaction model at fixed launched power.
//
// The intracavity coupling enters through the coupling scale
// C = g0²·|α(Δ=0)|² (rad²/s²), so g0²|α(Δ)|² = C·κ²/(κ² + Δ²).
// With shifts evaluated at ω_m the model depends on (β·A, τ_t, C) only through
// C·(1 + b) and τ_t·b/(1 + b), b = β·A/(1 + ω_m²τ_t²). A joint three-parameter
// fit is therefore rank deficient and is reported as degenerate; pin C
// (SweepFitOptions::coupling_scale) to identify β·A and τ_t.

#include <optional>
#include <span>
#include <vector>

#include "sfom/least_squares.hpp"
#include "sfom/model.hpp"

namespace sfom {

/// One measured point. Rates in rad/s; an error ≤ 0 means "not supplied".
struct SweepSample {
  double detuning_over_kappa = 0.0;
  double gamma = 0.0;  // total linewidth Γ_0 + δΓ
  double gamma_err = 0.0;
  double delta_omega = 0.0;
  double delta_omega_err = 0.0;
};

struct SweepFitFixed {
  double kappa = 0.0;    // rad/s
  double omega_m = 0.0;  // rad/s
  double gamma_0 = 0.0;  // rad/s
};

struct SweepModelParams {
  double beta_a = 0.0;
  double tau_t = 0.0;           // s
  double coupling_scale = 0.0;  // rad²/s²
};

struct SweepFitOptions {
  /// When set, C is held at this value and only (β·A, τ_t) are fitted.
  std::optional<double> coupling_scale;
  int max_iterations = 200;
  /// Smallest/largest singular value of the column-scaled Jacobian below which
  /// the fit is declared degenerate.
  double degeneracy_threshold = 1e-7;
};

struct BackactionFit {
  double beta_times_a = 0.0;
  double tau_t = 0.0;
  double coupling_scale = 0.0;
  bool coupling_scale_fixed = false;
  double residual_norm = 0.0;
  double reduced_chi2 = 0.0;
  double beta_times_a_err = 0.0;
  double tau_t_err = 0.0;
  double coupling_scale_err = 0.0;  // 0 when fixed
  int iterations = 0;
  std::size_t points = 0;

  SweepModelParams params() const { return {beta_times_a, tau_t, coupling_scale}; }
};

/// C for a configured system: g0²·|α(Δ=0)|².
double coupling_scale(const SystemParams& params);

/// Model (δω, δΓ) in rad/s at one detuning.
struct SweepModelValue {
  double delta_omega;
  double delta_gamma;
};
SweepModelValue sweep_model(const SweepFitFixed& fixed, const SweepModelParams& model,
                            double detuning_over_kappa);

/// Throws FitError: BadInput (< 4 points, non-finite data), Degenerate (rank
/// deficient Jacobian; message names the identifiable combinations),
/// NonConvergence, Bounds (τ_t driven outside [1 ps, 1 s]). Error payloads
/// carry (β·A, τ_t, C) best-so-far.
BackactionFit fit_detuning_sweep(std::span<const SweepSample> data, const SweepFitFixed& fixed,
                                 const SweepFitOptions& options = {});

}  // namespace sfom
