#pragma once

#include <functional>

#include <Eigen/Dense>

namespace wgm {

/// Fills the residual vector (size = number of observations) and, when the
/// Jacobian pointer is non-null, the Jacobian d residual / d params.
using ResidualFunction =
    std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& residual,
                       Eigen::MatrixXd* jacobian)>;

struct LmOptions {
    double relative_step_tolerance = 1e-8;
    int max_iterations = 200;
    double initial_damping = 1e-3;
};

struct LmResult {
    Eigen::VectorXd params;
    Eigen::VectorXd residual;
    Eigen::MatrixXd jacobian;
    double cost = 0.0;  ///< 0.5 * |residual|^2
    int iterations = 0;
    bool converged = false;
};

/// Damped Gauss-Newton (Levenberg-Marquardt with Marquardt diagonal scaling).
/// Converges when the relative parameter step drops below the tolerance;
/// reports converged = false after max_iterations.
LmResult levenberg_marquardt(const ResidualFunction& fn, Eigen::VectorXd initial,
                             const LmOptions& options = {});

/// Per-parameter standard errors sqrt(diag((J^T J)^-1) * s^2) with
/// s^2 = |r|^2 / (N - p). Entries are NaN when J^T J is singular.
Eigen::VectorXd standard_errors(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& residual);

}  // namespace wgm
