#include "sfom/superfluid.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "sfom/csv.hpp"
#include "sfom/least_squares.hpp"

namespace sfom {

void SuperfluidFilm::validate() const {
  if (!(std::isfinite(thickness_nm) && thickness_nm > 0.0)) throw InvalidParameter("film thickness must be positive");
  if (!(superfluid_fraction >= 0.0 && superfluid_fraction <= 1.0)) {
    throw InvalidParameter("superfluid fraction must lie in [0, 1]");
  }
  if (!(std::isfinite(alpha_vdw) && alpha_vdw > 0.0)) throw InvalidParameter("van der Waals coefficient must be positive");
}

double third_sound_speed(const SuperfluidFilm& film) {
  film.validate();
  const double d = film.thickness_nm;
  const double nm_per_s = std::sqrt(3.0 * film.superfluid_fraction * film.alpha_vdw / (d * d * d));
  return nm_per_s * 1e-9;
}

double mode_frequency(const SuperfluidFilm& film, double length_m, double zeta) {
  if (!(length_m > 0.0)) throw InvalidParameter("length scale must be positive");
  if (!(zeta > 0.0)) throw InvalidParameter("mode parameter must be positive");
  return zeta * third_sound_speed(film) / (2.0 * std::numbers::pi * length_m);
}

std::vector<BesselZero> circular_membrane_zeros(int max_order, int zeros_per_order) {
  std::vector<BesselZero> out;
  for (int n = 0; n <= max_order; ++n) {
    for (int k = 1; k <= zeros_per_order; ++k) {
      out.push_back({n, k, boost::math::cyl_bessel_j_zero(static_cast<double>(n), k)});
    }
  }
  std::sort(out.begin(), out.end(), [](const BesselZero& a, const BesselZero& b) { return a.value < b.value; });
  return out;
}

// ---------------------------------------------------------------- bath

void NonEquilibriumBath::validate() const {
  if (!(std::isfinite(s_plus) && s_plus >= 0.0 && std::isfinite(s_minus) && s_minus >= 0.0)) {
    throw InvalidParameter("bath spectral densities must be finite and >= 0");
  }
}

NonEquilibriumBath detailed_balance_bath(double temperature, double omega, double s_minus) {
  if (!(temperature > 0.0)) throw InvalidParameter("temperature must be positive");
  return {s_minus * std::exp(constants::hbar * omega / (constants::k_B * temperature)), s_minus};
}

namespace {

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

// (a − b)/ln(a/b), continued to a at a = b.
double log_mean(double a, double b) {
  const double m = 0.5 * (a + b);
  const double d = (a - b) / (a + b);
  if (std::abs(d) < 1e-4) return m * (1.0 - d * d / 3.0);
  return (a - b) / std::log(a / b);
}

}  // namespace

std::optional<double> bath_temperature(const NonEquilibriumBath& bath, double omega) {
  bath.validate();
  if (!(bath.s_plus > 0.0 && bath.s_minus > 0.0)) throw InvalidParameter("bath temperature needs positive densities");
  if (nearly_equal(bath.s_plus, bath.s_minus)) return std::nullopt;
  return constants::hbar * omega / (constants::k_B * std::log(bath.s_plus / bath.s_minus));
}

double bath_coupling(const NonEquilibriumBath& bath, const MechanicalMode& mode) {
  bath.validate();
  const double x = zero_point_motion(mode);
  return x * x / (constants::hbar * constants::hbar) * (bath.s_plus - bath.s_minus);
}

double bath_heat_input(const NonEquilibriumBath& bath, const MechanicalMode& mode) {
  bath.validate();
  if (!(bath.s_plus > 0.0 && bath.s_minus > 0.0)) throw InvalidParameter("bath temperature needs positive densities");
  const double x = zero_point_motion(mode);
  return mode.omega_m.angular() * x * x * log_mean(bath.s_plus, bath.s_minus) / (constants::hbar * constants::k_B);
}

double final_temperature(double temperature, double gamma_0, double t_b, double gamma_b) {
  if (!(gamma_0 > 0.0)) throw InvalidParameter("intrinsic damping must be positive");
  if (!(gamma_0 + gamma_b > 0.0)) throw InstabilityError("total damping Gamma_0 + Gamma_B <= 0: no steady state");
  return (temperature * gamma_0 + t_b * gamma_b) / (gamma_0 + gamma_b);
}

double final_temperature(double temperature, const NonEquilibriumBath& bath, const MechanicalMode& mode) {
  const double gamma_0 = mode.gamma_m.angular();
  const double gamma_b = bath_coupling(bath, mode);
  if (!(gamma_0 + gamma_b > 0.0)) {
    throw InstabilityError("total damping Gamma_0 + Gamma_B <= 0: no steady state");
  }
  return (temperature * gamma_0 + bath_heat_input(bath, mode)) / (gamma_0 + gamma_b);
}

// ---------------------------------------------------------------- power law

double PowerLawFit::evaluate(double power) const { return a * std::pow(power, b) + c; }

PowerLawFit fit_power_law(std::span<const double> powers, std::span<const double> values,
                          std::span<const double> errors) {
  const std::size_t n = powers.size();
  if (n < 4) throw FitError(FitError::Kind::BadInput, "power-law fit needs at least 4 points");
  if (values.size() != n || (!errors.empty() && errors.size() != n)) {
    throw FitError(FitError::Kind::BadInput, "powers, values and errors differ in length");
  }
  struct Point {
    double p, y, sigma;
  };
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = errors.empty() ? 1.0 : errors[i];
    if (!(powers[i] > 0.0) || !std::isfinite(powers[i]) || !std::isfinite(values[i])) {
      throw FitError(FitError::Kind::BadInput, "powers must be positive and values finite");
    }
    if (!(s > 0.0) || !std::isfinite(s)) throw FitError(FitError::Kind::BadInput, "errors must be positive");
    pts.push_back({powers[i], values[i], s});
  }
  std::sort(pts.begin(), pts.end(), [](const Point& l, const Point& r) { return std::tie(l.p, l.y, l.sigma) < std::tie(r.p, r.y, r.sigma); });

  // Work with P/P_ref so the amplitude stays O(y) whatever the power unit.
  double log_ref = 0.0;
  for (const auto& q : pts) log_ref += std::log(q.p);
  log_ref /= static_cast<double>(n);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::log(pts[i].p) - log_ref;

  // For fixed b the model is linear in (a', c).
  const auto linear_solve = [&](double b, double& a, double& c) {
    double s_ww = 0, s_w = 0, s_1 = 0, s_wy = 0, s_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 1.0 / (pts[i].sigma * pts[i].sigma);
      const double x = std::exp(b * u[i]);
      s_ww += w * x * x;
      s_w += w * x;
      s_1 += w;
      s_wy += w * x * pts[i].y;
      s_y += w * pts[i].y;
    }
    const double det = s_ww * s_1 - s_w * s_w;
    if (!(std::abs(det) > 1e-300)) return std::numeric_limits<double>::infinity();
    a = (s_wy * s_1 - s_w * s_y) / det;
    c = (s_ww * s_y - s_w * s_wy) / det;
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = (a * std::exp(b * u[i]) + c - pts[i].y) / pts[i].sigma;
      cost += r * r;
    }
    return cost;
  };

  // Seed b from the log-log slope of y − min(y), then check a coarse scan.
  const double y_min = std::min_element(pts.begin(), pts.end(), [](const Point& l, const Point& r) { return l.y < r.y; })->y;
  double su = 0, sv = 0, suu = 0, suv = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dy = pts[i].y - y_min;
    if (dy > 0.0) {
      const double v = std::log(dy);
      su += u[i];
      sv += v;
      suu += u[i] * u[i];
      suv += u[i] * v;
      ++m;
    }
  }
  std::vector<double> b_candidates;
  if (m >= 2) {
    const double md = static_cast<double>(m);
    const double den = suu - su * su / md;
    if (den > 0.0) b_candidates.push_back((suv - su * sv / md) / den);
  }
  for (int k = -20; k <= 30; ++k) {
    if (k != 0) b_candidates.push_back(0.1 * k);
  }
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> start;
  for (double b : b_candidates) {
    double a = 0, c = 0;
    const double cost = linear_solve(b, a, c);
    if (cost < best_cost) {
      best_cost = cost;
      start = {a, b, c};
    }
  }
  if (start.empty()) throw FitError(FitError::Kind::NonConvergence, "no usable starting point");

  const ResidualFn fn = [&](std::span<const double> q, std::span<double> r) {
    for (std::size_t i = 0; i < n; ++i) r[i] = (q[0] * std::exp(q[1] * u[i]) + q[2] - pts[i].y) / pts[i].sigma;
  };
  double y_scale = 0.0;
  for (const auto& q : pts) y_scale = std::max(y_scale, std::abs(q.y));
  LeastSquaresOptions lm;
  lm.fd_absolute_step = {1e-9 * std::max(y_scale, 1e-300), 1e-9, 1e-9 * std::max(y_scale, 1e-300)};
  const auto result = levenberg_marquardt(fn, n, start, lm);
  const auto& q = result.params;
  const double scale_ref = std::exp(-q[1] * log_ref);  // a = a'·P_ref^{-b}
  const std::vector<double> payload{q[0] * scale_ref, q[1], q[2]};
  if (!result.converged) throw FitError(FitError::Kind::NonConvergence, "power-law fit: " + result.message, payload);
  if (result.covariance.empty()) {
    throw FitError(FitError::Kind::Degenerate, "power-law parameters not identifiable (flat data?)", payload);
  }

  PowerLawFit fit;
  fit.a = payload[0];
  fit.b = q[1];
  fit.c = q[2];
  fit.points = n;
  fit.residual_norm = result.residual_norm();
  const double dof = static_cast<double>(n) - 3.0;
  fit.reduced_chi2 = dof > 0.0 ? 2.0 * result.cost / dof : std::numeric_limits<double>::quiet_NaN();
  const double s2 = errors.empty() && dof > 0.0 ? fit.reduced_chi2 : 1.0;
  const auto cov = [&](std::size_t i, std::size_t j) { return s2 * result.covariance[i * 3 + j]; };
  // a = a'·exp(−b·log_ref): ∂a/∂a' = scale_ref, ∂a/∂b = −a·log_ref.
  const double ga = scale_ref, gb = -fit.a * log_ref;
  fit.a_err = std::sqrt(std::max(0.0, ga * ga * cov(0, 0) + gb * gb * cov(1, 1) + 2.0 * ga * gb * cov(0, 1)));
  fit.b_err = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.c_err = std::sqrt(std::max(0.0, cov(2, 2)));
  return fit;
}

std::vector<FrequencyTemperaturePoint> read_frequency_temperature(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto t = table.column_values("temperature_k");
  const auto f = table.column_values("frequency_hz");
  std::vector<FrequencyTemperaturePoint> out;
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back({t[i], f[i]});
  return out;
}

}  // namespace sfom
