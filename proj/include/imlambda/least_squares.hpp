#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace imlambda {

struct LeastSquaresOptions {
    double fd_rel_step = 1e-4;   // central-difference step relative to |p_k| (absolute if p_k == 0)
    double param_rtol = 1e-6;    // trust-region radius relative to the scaled parameter norm
    int max_iterations = 200;
    double initial_step_factor = 1.0; // initial trust-region radius relative to the scaled parameter norm
};

struct LeastSquaresResult {
    Eigen::VectorXd params;
    Eigen::VectorXd residuals;
    double cost = 0.0; // 0.5 |r|^2
    int iterations = 0;
    std::vector<double> cost_history;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Levenberg-Marquardt (MINPACK trust-region variant) with a central-difference Jacobian.
/// Throws FitError carrying the last iterate when not converged.
LeastSquaresResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd p0,
                                       const LeastSquaresOptions& options = {});

} // namespace imlambda
