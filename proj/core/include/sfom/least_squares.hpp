#pragma once

// Damped Gauss-Newton (Levenberg-Marquardt) for small dense problems. The
// caller supplies already-weighted residuals r_i = (y_i - model_i)/sigma_i;
// the Jacobian is taken by central finite differences.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sfom {

using ResidualFn = std::function<void(std::span<const double> params, std::span<double> residuals)>;

struct LeastSquaresOptions {
  int max_iterations = 200;
  double relative_step_tolerance = 1e-12;
  double cost_tolerance = 1e-15;  // relative decrease considered converged
  double gradient_tolerance = 1e-14;
  double initial_damping = 1e-3;
  double fd_relative_step = 1e-6;
  /// Per-parameter absolute FD step floor, used when a parameter is near zero.
  std::vector<double> fd_absolute_step;
};

struct LeastSquaresResult {
  std::vector<double> params;
  std::vector<double> residuals;
  double cost = 0.0;  // 0.5 * |r|^2
  int iterations = 0;
  bool converged = false;
  std::string message;
  /// Row-major n_residuals x n_params Jacobian at `params`.
  std::vector<double> jacobian;
  /// Singular values of the column-normalised Jacobian, descending.
  std::vector<double> singular_values;
  /// Right singular vector of the smallest singular value (column-normalised basis).
  std::vector<double> weakest_direction;
  /// (J^T J)^-1, row-major; empty when J is rank deficient.
  std::vector<double> covariance;

  double residual_norm() const;
  double condition_ratio() const;  // smallest / largest singular value
  std::vector<double> standard_errors() const;
};

/// A fit that did not produce a usable estimate. `best_params` holds the
/// best-so-far state in the fit's own parametrisation (may be empty).
class FitError : public std::runtime_error {
 public:
  enum class Kind { NonConvergence, Degenerate, Bounds, NoPeak, BadInput };

  FitError(Kind kind, const std::string& message, std::vector<double> best_params = {})
      : std::runtime_error(message), kind_(kind), best_params_(std::move(best_params)) {}

  Kind kind() const { return kind_; }
  const std::vector<double>& best_params() const { return best_params_; }

 private:
  Kind kind_;
  std::vector<double> best_params_;
};

const char* to_string(FitError::Kind kind);

LeastSquaresResult levenberg_marquardt(const ResidualFn& fn, std::size_t n_residuals,
                                       std::vector<double> initial,
                                       const LeastSquaresOptions& options = {});

/// Central-difference Jacobian, row-major.
std::vector<double> numeric_jacobian(const ResidualFn& fn, std::size_t n_residuals,
                                     std::span<const double> params,
                                     const LeastSquaresOptions& options);

}  // namespace sfom
