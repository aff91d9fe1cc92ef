#include "wgm/least_squares.hpp"

#include <cmath>
#include <limits>

namespace wgm {

LmResult levenberg_marquardt(const ResidualFunction& fn, Eigen::VectorXd initial,
                             const LmOptions& options) {
    LmResult result;
    result.params = std::move(initial);
    fn(result.params, result.residual, &result.jacobian);
    result.cost = 0.5 * result.residual.squaredNorm();

    const Eigen::Index np = result.params.size();
    Eigen::MatrixXd jtj = result.jacobian.transpose() * result.jacobian;
    Eigen::VectorXd grad = result.jacobian.transpose() * result.residual;
    double damping = options.initial_damping;

    Eigen::VectorXd trial_residual;
    Eigen::MatrixXd trial_jacobian;
    while (result.iterations < options.max_iterations) {
        ++result.iterations;
        Eigen::VectorXd scale = jtj.diagonal();
        const double floor = std::max(scale.maxCoeff(), 1.0) * 1e-14;
        for (Eigen::Index i = 0; i < np; ++i) scale[i] = std::max(scale[i], floor);

        // Inner loop: raise damping until a step lowers the cost or becomes
        // negligibly small.
        for (;;) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal() += damping * scale;
            const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
            const double step_norm = step.norm();
            const double tol = options.relative_step_tolerance;
            if (!std::isfinite(step_norm) || step_norm <= tol * (result.params.norm() + tol)) {
                result.converged = std::isfinite(step_norm);
                return result;
            }
            const Eigen::VectorXd trial = result.params + step;
            fn(trial, trial_residual, nullptr);
            const double trial_cost = 0.5 * trial_residual.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost < result.cost) {
                result.params = trial;
                fn(result.params, result.residual, &result.jacobian);
                result.cost = 0.5 * result.residual.squaredNorm();
                jtj = result.jacobian.transpose() * result.jacobian;
                grad = result.jacobian.transpose() * result.residual;
                damping = std::max(damping / 3.0, 1e-12);
                if (step_norm <= tol * (result.params.norm() + tol)) {
                    result.converged = true;
                    return result;
                }
                break;
            }
            damping *= 4.0;
            if (damping > 1e20) {
                // No descent direction left: stationary to working precision.
                result.converged = true;
                return result;
            }
        }
    }
    return result;
}

Eigen::VectorXd standard_errors(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& residual) {
    const Eigen::Index n = jacobian.rows();
    const Eigen::Index p = jacobian.cols();
    Eigen::VectorXd errors =
        Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    if (n <= p) return errors;
    const double s2 = residual.squaredNorm() / static_cast<double>(n - p);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jacobian);
    if (qr.rank() < p) return errors;
    // (J^T J)^-1 = P R^-1 R^-T P^T
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd rinv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd cov_perm = rinv * rinv.transpose();
    const auto& perm = qr.colsPermutation();
    const Eigen::MatrixXd cov = perm * cov_perm * perm.transpose();
    for (Eigen::Index i = 0; i < p; ++i) errors[i] = std::sqrt(cov(i, i) * s2);
    return errors;
}

}  // namespace wgm
