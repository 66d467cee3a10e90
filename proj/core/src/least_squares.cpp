#include "sfom/least_squares.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace sfom {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

double half_norm2(std::span<const double> r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return 0.5 * s;
}

bool all_finite(std::span<const double> r) {
  return std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

const char* to_string(FitError::Kind kind) {
  switch (kind) {
    case FitError::Kind::NonConvergence: return "non_convergence";
    case FitError::Kind::Degenerate: return "degenerate";
    case FitError::Kind::Bounds: return "bounds";
    case FitError::Kind::NoPeak: return "no_peak";
    case FitError::Kind::BadInput: return "bad_input";
  }
  return "unknown";
}

double LeastSquaresResult::residual_norm() const { return std::sqrt(2.0 * cost); }

double LeastSquaresResult::condition_ratio() const {
  if (singular_values.empty() || singular_values.front() == 0.0) return 0.0;
  return singular_values.back() / singular_values.front();
}

std::vector<double> LeastSquaresResult::standard_errors() const {
  const std::size_t n = params.size();
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  if (covariance.size() != n * n) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(std::max(0.0, covariance[i * n + i]));
  return out;
}

std::vector<double> numeric_jacobian(const ResidualFn& fn, std::size_t n_residuals,
                                     std::span<const double> params,
                                     const LeastSquaresOptions& options) {
  const std::size_t n = params.size();
  std::vector<double> jac(n_residuals * n);
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> r_plus(n_residuals), r_minus(n_residuals);
  for (std::size_t j = 0; j < n; ++j) {
    const double floor = j < options.fd_absolute_step.size() ? options.fd_absolute_step[j] : 1e-12;
    const double h = std::max(options.fd_relative_step * std::abs(params[j]), floor);
    p[j] = params[j] + h;
    fn(p, r_plus);
    p[j] = params[j] - h;
    fn(p, r_minus);
    p[j] = params[j];
    for (std::size_t i = 0; i < n_residuals; ++i) {
      jac[i * n + j] = (r_plus[i] - r_minus[i]) / (2.0 * h);
    }
  }
  return jac;
}

LeastSquaresResult levenberg_marquardt(const ResidualFn& fn, std::size_t n_residuals,
                                       std::vector<double> initial,
                                       const LeastSquaresOptions& options) {
  const std::size_t n = initial.size();
  LeastSquaresResult result;
  result.params = std::move(initial);
  result.residuals.assign(n_residuals, 0.0);
  fn(result.params, result.residuals);
  if (!all_finite(result.residuals)) {
    result.message = "non-finite residuals at the initial point";
    result.cost = std::numeric_limits<double>::infinity();
    return result;
  }
  result.cost = half_norm2(result.residuals);

  double lambda = options.initial_damping;
  std::vector<double> trial(n), trial_r(n_residuals);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    if (result.cost < 1e-300) {
      result.converged = true;
      result.message = "zero residual";
      break;
    }
    const auto jac = numeric_jacobian(fn, n_residuals, result.params, options);
    const Eigen::Map<const Matrix> J(jac.data(), static_cast<Eigen::Index>(n_residuals),
                                     static_cast<Eigen::Index>(n));
    const Eigen::Map<const Vector> r(result.residuals.data(), static_cast<Eigen::Index>(n_residuals));
    const Eigen::MatrixXd A = J.transpose() * J;
    const Vector g = J.transpose() * r;

    if (g.cwiseAbs().maxCoeff() <= options.gradient_tolerance * std::max(1.0, result.cost)) {
      result.converged = true;
      result.message = "gradient below tolerance";
      break;
    }

    Vector diag = A.diagonal();
    const double diag_floor = std::max(diag.maxCoeff() * 1e-15, 1e-300);
    for (Eigen::Index i = 0; i < diag.size(); ++i) diag[i] = std::max(diag[i], diag_floor);

    bool accepted = false;
    bool step_small = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd damped = A;
      damped.diagonal() += lambda * diag;
      const Vector step = damped.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) trial[j] = result.params[j] + step[static_cast<Eigen::Index>(j)];
      fn(trial, trial_r);
      const double trial_cost = all_finite(trial_r) ? half_norm2(trial_r) : std::numeric_limits<double>::infinity();
      if (trial_cost < result.cost) {
        const double decrease = (result.cost - trial_cost) / result.cost;
        double step_norm = 0.0, param_norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          step_norm += step[static_cast<Eigen::Index>(j)] * step[static_cast<Eigen::Index>(j)];
          param_norm += result.params[j] * result.params[j];
        }
        step_small = std::sqrt(step_norm) <= options.relative_step_tolerance * (std::sqrt(param_norm) + 1e-300);
        result.params = trial;
        result.residuals = trial_r;
        result.cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (decrease < options.cost_tolerance) step_small = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e16) break;
    }
    if (!accepted) {
      // No downhill step at any damping: a (possibly degenerate) minimum.
      result.converged = true;
      result.message = "no further decrease";
      break;
    }
    if (step_small) {
      result.converged = true;
      result.message = "step below tolerance";
      break;
    }
  }
  if (!result.converged && result.message.empty()) result.message = "maximum iterations reached";

  // Final diagnostics at the returned point.
  result.jacobian = numeric_jacobian(fn, n_residuals, result.params, options);
  const Eigen::Map<const Matrix> J(result.jacobian.data(), static_cast<Eigen::Index>(n_residuals),
                                   static_cast<Eigen::Index>(n));
  Vector col_norm(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < col_norm.size(); ++j) {
    col_norm[j] = J.col(j).norm();
    if (col_norm[j] == 0.0) col_norm[j] = 1.0;
  }
  const Eigen::MatrixXd Jn = J * col_norm.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jn, Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  result.singular_values.assign(s.data(), s.data() + s.size());
  if (s.size() > 0) {
    const Vector v = svd.matrixV().col(s.size() - 1);
    result.weakest_direction.assign(v.data(), v.data() + v.size());
  }
  if (result.condition_ratio() > 1e-12) {
    const Eigen::MatrixXd cov = (J.transpose() * J).inverse();
    result.covariance.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        result.covariance[i * n + j] = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return result;
}

}  // namespace sfom
