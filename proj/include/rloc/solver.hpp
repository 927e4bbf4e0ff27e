#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rloc {

/// One residual term of a nonlinear least-squares problem. `evaluate` maps
/// the referenced slice of the state vector to a residual (and optionally an
/// analytic Jacobian with one column per referenced parameter, in order).
/// `sqrt_information` is the Cholesky factor W of the inverse covariance, so
/// that ||W r||^2 is the Mahalanobis norm r^T Sigma^-1 r.
struct ResidualBlock {
  std::vector<int> parameter_indices;
  int dimension = 0;
  std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& residual,
                     Eigen::MatrixXd* jacobian)>
      evaluate;
  Eigen::MatrixXd sqrt_information;  // dimension x dimension; empty = identity
};

struct SolverOptions {
  int max_iterations = 100;
  double initial_lambda = 1e-4;
  double lambda_increase = 10.0;
  double lambda_decrease = 0.5;
  double relative_cost_tolerance = 1e-8;
  double gradient_tolerance = 1e-10;
  double absolute_cost_floor = 1e-16;  // times initial cost
  bool use_analytic_jacobians = true;
  double huber_delta = 0.0;  // 0 disables the robust loss
};

struct SolverReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;
  double wall_time_s = 0.0;
  std::string message;
};

struct SolveResult {
  Eigen::VectorXd state;
  SolverReport report;
};

/// Levenberg-Marquardt over dense normal equations (Cholesky with QR
/// fallback). Throws std::invalid_argument on out-of-range parameter indices
/// or a non-finite residual at the initial state.
SolveResult solve(const std::vector<ResidualBlock>& blocks,
                  const Eigen::VectorXd& initial_state,
                  const SolverOptions& options = {});

/// Central-difference Jacobian of one block at the given parameter slice,
/// step h_i = max(1e-6, 1e-6 |x_i|). Unweighted (no sqrt_information).
Eigen::MatrixXd numeric_jacobian(const ResidualBlock& block,
                                 const Eigen::VectorXd& params);

/// Gauss-Newton Hessian J^T J (weighted) at the given state; the inverse is
/// the usual covariance estimate at a solution.
Eigen::MatrixXd gauss_newton_hessian(const std::vector<ResidualBlock>& blocks,
                                     const Eigen::VectorXd& state,
                                     bool use_analytic_jacobians = true);

}  // namespace rloc
