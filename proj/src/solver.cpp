#include "rloc/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace rloc {

namespace {

Eigen::VectorXd gather(const Eigen::VectorXd& state,
                       const std::vector<int>& indices) {
  Eigen::VectorXd out(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) out[i] = state[indices[i]];
  return out;
}

// Evaluates one block at the full state: weighted residual and weighted
// Jacobian (numeric fallback when the block provides none or analytic
// Jacobians are disabled).
void evaluate_block(const ResidualBlock& block, const Eigen::VectorXd& state,
                    bool analytic, Eigen::VectorXd& residual,
                    Eigen::MatrixXd* jacobian) {
  const Eigen::VectorXd params = gather(state, block.parameter_indices);
  residual.resize(block.dimension);
  Eigen::MatrixXd jac;
  bool have_jac = false;
  if (jacobian && analytic) {
    jac.resize(block.dimension, params.size());
    jac.setConstant(std::numeric_limits<double>::quiet_NaN());
    block.evaluate(params, residual, &jac);
    have_jac = jac.allFinite();
  } else {
    block.evaluate(params, residual, nullptr);
  }
  if (jacobian) {
    if (!have_jac) jac = numeric_jacobian(block, params);
    *jacobian = jac;
    if (block.sqrt_information.size() > 0) *jacobian = block.sqrt_information * *jacobian;
  }
  if (block.sqrt_information.size() > 0) residual = block.sqrt_information * residual;
}

// Triggs correction for the Huber loss: scales residual and Jacobian so the
// Gauss-Newton step minimizes the robustified cost.
void apply_loss(double delta, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
  if (delta <= 0.0) return;
  const double norm = r.norm();
  if (norm <= delta || norm == 0.0) return;
  const double scale = std::sqrt(delta / norm);
  r *= scale;
  if (jac) *jac *= scale;
}

double total_cost(const std::vector<ResidualBlock>& blocks,
                  const Eigen::VectorXd& state, double huber_delta) {
  double cost = 0.0;
  Eigen::VectorXd r;
  for (const auto& block : blocks) {
    evaluate_block(block, state, false, r, nullptr);
    const double s = r.squaredNorm();
    if (huber_delta > 0.0 && r.norm() > huber_delta) {
      cost += 0.5 * (2.0 * huber_delta * r.norm() - huber_delta * huber_delta);
    } else {
      cost += 0.5 * s;
    }
  }
  return cost;
}

}  // namespace

Eigen::MatrixXd numeric_jacobian(const ResidualBlock& block,
                                 const Eigen::VectorXd& params) {
  Eigen::MatrixXd jac(block.dimension, params.size());
  Eigen::VectorXd x = params;
  Eigen::VectorXd r_plus(block.dimension), r_minus(block.dimension);
  for (int i = 0; i < params.size(); ++i) {
    const double h = std::max(1e-6, 1e-6 * std::abs(params[i]));
    x[i] = params[i] + h;
    block.evaluate(x, r_plus, nullptr);
    x[i] = params[i] - h;
    block.evaluate(x, r_minus, nullptr);
    x[i] = params[i];
    jac.col(i) = (r_plus - r_minus) / (2.0 * h);
  }
  return jac;
}

Eigen::MatrixXd gauss_newton_hessian(const std::vector<ResidualBlock>& blocks,
                                     const Eigen::VectorXd& state,
                                     bool use_analytic_jacobians) {
  const int n = static_cast<int>(state.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  for (const auto& block : blocks) {
    evaluate_block(block, state, use_analytic_jacobians, r, &jac);
    const auto& idx = block.parameter_indices;
    for (size_t a = 0; a < idx.size(); ++a)
      for (size_t b = 0; b < idx.size(); ++b)
        h(idx[a], idx[b]) += jac.col(a).dot(jac.col(b));
  }
  return h;
}

SolveResult solve(const std::vector<ResidualBlock>& blocks,
                  const Eigen::VectorXd& initial_state,
                  const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int n = static_cast<int>(initial_state.size());
  if (!initial_state.allFinite()) {
    throw std::invalid_argument("solve: initial state is not finite");
  }
  for (const auto& block : blocks) {
    for (int idx : block.parameter_indices) {
      if (idx < 0 || idx >= n) {
        throw std::invalid_argument("solve: parameter index out of range");
      }
    }
  }

  SolveResult result;
  result.state = initial_state;
  SolverReport& report = result.report;

  double cost = total_cost(blocks, result.state, options.huber_delta);
  if (!std::isfinite(cost)) {
    throw std::invalid_argument("solve: non-finite residual at initial state");
  }
  report.initial_cost = cost;
  report.final_cost = cost;

  double lambda = options.initial_lambda;
  Eigen::MatrixXd hessian(n, n);
  Eigen::VectorXd gradient(n), residual;
  Eigen::MatrixXd jac;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    hessian.setZero();
    gradient.setZero();
    for (const auto& block : blocks) {
      evaluate_block(block, result.state, options.use_analytic_jacobians,
                     residual, &jac);
      apply_loss(options.huber_delta, residual, &jac);
      const auto& idx = block.parameter_indices;
      for (size_t a = 0; a < idx.size(); ++a) {
        gradient[idx[a]] += jac.col(a).dot(residual);
        for (size_t b = 0; b < idx.size(); ++b)
          hessian(idx[a], idx[b]) += jac.col(a).dot(jac.col(b));
      }
    }

    if (gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      report.converged = true;
      report.message = "gradient tolerance reached";
      break;
    }

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = hessian;
      for (int i = 0; i < n; ++i) {
        damped(i, i) += lambda * std::max(hessian(i, i), 1e-12);
      }
      Eigen::VectorXd step;
      Eigen::LLT<Eigen::MatrixXd> llt(damped);
      if (llt.info() == Eigen::Success) {
        step = llt.solve(-gradient);
      } else {
        step = damped.colPivHouseholderQr().solve(-gradient);
      }

      const Eigen::VectorXd candidate = result.state + step;
      const double new_cost =
          candidate.allFinite()
              ? total_cost(blocks, candidate, options.huber_delta)
              : std::numeric_limits<double>::infinity();

      if (std::isfinite(new_cost) && new_cost <= cost) {
        accepted = true;
        result.state = candidate;
        const double decrease = cost - new_cost;
        cost = new_cost;
        lambda = std::max(lambda * options.lambda_decrease, 1e-12);
        report.iterations = iter + 1;
        report.final_cost = cost;
        if (cost < options.absolute_cost_floor * report.initial_cost ||
            decrease < options.relative_cost_tolerance *
                           std::max(report.initial_cost == 0.0 ? 1.0 : cost, 1e-300)) {
          report.converged = true;
          report.message = "cost tolerance reached";
        }
      } else {
        lambda *= options.lambda_increase;
        if (lambda > 1e12) {
          report.message = "damping exhausted";
          break;
        }
      }
    }
    if (report.converged || !accepted) break;
  }

  if (!report.converged && report.message.empty()) {
    report.message = "max iterations reached";
  }
  report.final_cost = cost;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace rloc
