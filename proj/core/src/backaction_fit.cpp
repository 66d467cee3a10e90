#include "sfom/backaction_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "sfom/backaction.hpp"

namespace sfom {

namespace {

constexpr double kTauMin = 1e-12;
constexpr double kTauMax = 1.0;

struct Weights {
  bool absolute = false;  // true when every residual carries a supplied sigma
  std::vector<double> gamma;
  std::vector<double> omega;
};

Weights make_weights(std::span<const SweepSample> data) {
  Weights w;
  const bool gamma_sig = std::all_of(data.begin(), data.end(), [](const SweepSample& s) { return s.gamma_err > 0.0; });
  const bool omega_sig =
      std::all_of(data.begin(), data.end(), [](const SweepSample& s) { return s.delta_omega_err > 0.0; });
  w.absolute = gamma_sig && omega_sig;
  for (const auto& s : data) {
    w.gamma.push_back(gamma_sig ? 1.0 / s.gamma_err : 1.0);
    w.omega.push_back(omega_sig ? 1.0 / s.delta_omega_err : 1.0);
  }
  return w;
}

// Parameter vector: [β·A, ln τ_t] or [β·A, ln τ_t, ln C].
SweepModelParams unpack(std::span<const double> p, std::optional<double> fixed_c) {
  return {p[0], std::exp(p[1]), fixed_c ? *fixed_c : std::exp(p[2])};
}

void residuals(std::span<const SweepSample> data, const Weights& w, const SweepFitFixed& fixed,
               const SweepModelParams& model, std::span<double> out) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto v = sweep_model(fixed, model, data[i].detuning_over_kappa);
    out[2 * i] = w.gamma[i] * (fixed.gamma_0 + v.delta_gamma - data[i].gamma);
    out[2 * i + 1] = w.omega[i] * (v.delta_omega - data[i].delta_omega);
  }
}

std::string describe_weak_direction(const std::vector<double>& direction, bool joint) {
  static const char* names[] = {"beta_times_A", "log tau_t", "log coupling_scale"};
  std::ostringstream os;
  os << "unidentifiable parameter combination along (";
  for (std::size_t j = 0; j < direction.size(); ++j) {
    os << (j ? ", " : "") << names[j] << ": " << direction[j];
  }
  os << ")";
  if (joint) {
    os << "; the sweep constrains only coupling_scale*(1+b) and tau_t*b/(1+b), "
          "b = beta_times_A/(1+omega_m^2 tau_t^2); fix coupling_scale";
  }
  return os.str();
}

}  // namespace

double coupling_scale(const SystemParams& params) {
  const double g0 = params.g0();
  return g0 * g0 * intracavity_photons(params.with_detuning(0.0).cavity, params.drive);
}

SweepModelValue sweep_model(const SweepFitFixed& fixed, const SweepModelParams& model,
                            double detuning_over_kappa) {
  const double kappa = fixed.kappa;
  const double delta = detuning_over_kappa * kappa;
  const double w = fixed.omega_m;
  const double tau = model.tau_t;
  const double c = kappa * kappa + delta * delta - w * w;
  const double pair_norm = c * c + 4.0 * kappa * kappa * w * w;
  const double g0_sq_photons = model.coupling_scale * kappa * kappa / (kappa * kappa + delta * delta);
  const double prefactor = 4.0 * g0_sq_photons * w * delta / pair_norm;
  const double b = model.beta_a / (1.0 + w * w * tau * tau);
  return {prefactor / (2.0 * w) * (c * (1.0 + b) - 2.0 * kappa * w * w * tau * b),
          -prefactor * (c * tau * b + 2.0 * kappa * (1.0 + b))};
}

BackactionFit fit_detuning_sweep(std::span<const SweepSample> input, const SweepFitFixed& fixed,
                                 const SweepFitOptions& options) {
  if (input.size() < 4) throw FitError(FitError::Kind::BadInput, "sweep fit needs at least 4 points");
  if (!(fixed.kappa > 0.0 && fixed.omega_m > 0.0 && fixed.gamma_0 > 0.0)) {
    throw FitError(FitError::Kind::BadInput, "kappa, omega_m and gamma_0 must be positive");
  }
  if (options.coupling_scale && !(*options.coupling_scale > 0.0)) {
    throw FitError(FitError::Kind::BadInput, "fixed coupling_scale must be positive");
  }
  std::vector<SweepSample> data(input.begin(), input.end());
  for (const auto& s : data) {
    if (!std::isfinite(s.detuning_over_kappa) || !std::isfinite(s.gamma) || !std::isfinite(s.delta_omega) ||
        !std::isfinite(s.gamma_err) || !std::isfinite(s.delta_omega_err)) {
      throw FitError(FitError::Kind::BadInput, "non-finite sweep sample");
    }
  }
  // Canonical order makes the result independent of input order, bit for bit.
  std::sort(data.begin(), data.end(), [](const SweepSample& a, const SweepSample& b) {
    return std::tie(a.detuning_over_kappa, a.gamma, a.delta_omega, a.gamma_err, a.delta_omega_err) <
           std::tie(b.detuning_over_kappa, b.gamma, b.delta_omega, b.gamma_err, b.delta_omega_err);
  });

  const Weights weights = make_weights(data);
  const std::size_t n_res = 2 * data.size();
  const auto fixed_c = options.coupling_scale;
  const bool joint = !fixed_c.has_value();

  const ResidualFn fn = [&](std::span<const double> p, std::span<double> r) {
    residuals(data, weights, fixed, unpack(p, fixed_c), r);
  };

  // Coarse grid over (β·A, τ_t); C, when free, is solved linearly per node.
  struct Start {
    double cost;
    std::vector<double> p;
  };
  std::vector<Start> starts;
  std::vector<double> beta_grid{0.0};
  for (int k = 0; k <= 12; ++k) {
    const double mag = std::pow(10.0, -1.0 + 3.0 * k / 12.0);
    beta_grid.push_back(mag);
    beta_grid.push_back(-mag);
  }
  std::vector<double> r(n_res);
  for (double beta_a : beta_grid) {
    for (int k = 0; k <= 16; ++k) {
      const double tau = std::pow(10.0, -8.0 + 4.0 * k / 16.0);
      double c = fixed_c.value_or(1.0);
      if (joint) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
          const auto v = sweep_model(fixed, {beta_a, tau, 1.0}, data[i].detuning_over_kappa);
          const double wg = weights.gamma[i] * weights.gamma[i];
          const double wo = weights.omega[i] * weights.omega[i];
          num += wg * v.delta_gamma * (data[i].gamma - fixed.gamma_0) + wo * v.delta_omega * data[i].delta_omega;
          den += wg * v.delta_gamma * v.delta_gamma + wo * v.delta_omega * v.delta_omega;
        }
        if (!(den > 0.0) || !(num > 0.0)) continue;
        c = num / den;
      }
      std::vector<double> p{beta_a, std::log(tau)};
      if (joint) p.push_back(std::log(c));
      fn(p, r);
      double cost = 0.0;
      for (double v : r) cost += v * v;
      if (std::isfinite(cost)) starts.push_back({cost, std::move(p)});
    }
  }
  if (starts.empty()) throw FitError(FitError::Kind::NonConvergence, "no finite starting point on the seed grid");
  std::sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) { return a.cost < b.cost; });

  LeastSquaresOptions lm;
  lm.max_iterations = options.max_iterations;
  lm.fd_absolute_step = {1e-6, 1e-7, 1e-7};
  std::optional<LeastSquaresResult> best;
  const std::size_t n_starts = std::min<std::size_t>(starts.size(), 4);
  for (std::size_t s = 0; s < n_starts; ++s) {
    auto result = levenberg_marquardt(fn, n_res, starts[s].p, lm);
    if (!best || result.cost < best->cost) best = std::move(result);
  }

  const auto model = unpack(best->params, fixed_c);
  const std::vector<double> payload{model.beta_a, model.tau_t, model.coupling_scale};
  if (best->condition_ratio() < options.degeneracy_threshold) {
    throw FitError(FitError::Kind::Degenerate, describe_weak_direction(best->weakest_direction, joint), payload);
  }
  if (!best->converged) {
    throw FitError(FitError::Kind::NonConvergence, "sweep fit: " + best->message, payload);
  }
  if (model.tau_t < kTauMin || model.tau_t > kTauMax) {
    throw FitError(FitError::Kind::Bounds, "tau_t left the admissible range [1 ps, 1 s]", payload);
  }

  BackactionFit fit;
  fit.beta_times_a = model.beta_a;
  fit.tau_t = model.tau_t;
  fit.coupling_scale = model.coupling_scale;
  fit.coupling_scale_fixed = !joint;
  fit.residual_norm = best->residual_norm();
  fit.iterations = best->iterations;
  fit.points = data.size();
  const double dof = static_cast<double>(n_res) - static_cast<double>(best->params.size());
  fit.reduced_chi2 = dof > 0.0 ? 2.0 * best->cost / dof : std::numeric_limits<double>::quiet_NaN();
  auto se = best->standard_errors();
  // Without supplied sigmas the residual scatter sets the error scale.
  const double scale = weights.absolute || !(dof > 0.0) ? 1.0 : std::sqrt(fit.reduced_chi2);
  fit.beta_times_a_err = se[0] * scale;
  fit.tau_t_err = se[1] * scale * model.tau_t;
  if (joint) fit.coupling_scale_err = se[2] * scale * model.coupling_scale;
  return fit;
}

}  // namespace sfom
