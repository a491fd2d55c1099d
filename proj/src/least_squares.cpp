#include "imlambda/least_squares.hpp"

#include "imlambda/errors.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <cmath>

namespace imlambda {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Adapts a residual callback to MINPACK's functor protocol; the Jacobian is a
// central difference with relative step.
struct Functor {
    using Scalar = double;
    const ResidualFn& f;
    Eigen::Index m;
    double rel;
    double penalty;

    Eigen::VectorXd eval(const Eigen::VectorXd& p) const {
        Eigen::VectorXd r = f(p);
        if (r.size() != m) throw NumericalError("residual length changed during the fit");
        if (!r.allFinite()) r.setConstant(penalty);
        return r;
    }
    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& fvec) const {
        fvec = eval(p);
        return 0;
    }
    int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
        jac.resize(m, p.size());
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            const double h = p(k) != 0.0 ? rel * std::abs(p(k)) : rel;
            Eigen::VectorXd qp = p, qm = p;
            qp(k) += h;
            qm(k) -= h;
            jac.col(k) = (eval(qp) - eval(qm)) / (2.0 * h);
        }
        return 0;
    }
    Eigen::Index values() const { return m; }
};

} // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd p0, const LeastSquaresOptions& opt) {
    const Eigen::VectorXd r0 = residual(p0);
    if (!r0.allFinite()) throw FitError("residual not finite at the initial guess", to_vector(p0), {});
    if (r0.size() < p0.size()) throw FitError("fewer residuals than parameters", to_vector(p0), {});

    Functor fn{residual, r0.size(), opt.fd_rel_step, 1e3 * std::max(1.0, r0.cwiseAbs().maxCoeff())};
    Eigen::LevenbergMarquardt<Functor> lm(fn);
    lm.parameters.xtol = opt.param_rtol;
    lm.parameters.ftol = 1e-12;
    lm.parameters.gtol = 0.0;
    lm.parameters.factor = opt.initial_step_factor;
    lm.parameters.maxfev = 100000;

    LeastSquaresResult res;
    res.params = std::move(p0);
    res.cost_history.push_back(0.5 * r0.squaredNorm());
    Eigen::LevenbergMarquardtSpace::Status status = lm.minimizeInit(res.params);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters)
        throw FitError("improper least-squares configuration", to_vector(res.params), res.cost_history);

    int it = 0;
    bool done = false;
    while (!done) {
        if (it >= opt.max_iterations)
            throw FitError("least-squares fit did not converge", to_vector(res.params), res.cost_history);
        status = lm.minimizeOneStep(res.params);
        ++it;
        res.cost_history.push_back(0.5 * lm.fvec.squaredNorm());
        done = status != Eigen::LevenbergMarquardtSpace::Running;
    }
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
        status == Eigen::LevenbergMarquardtSpace::UserAsked)
        throw FitError("least-squares fit aborted", to_vector(res.params), res.cost_history);

    res.residuals = fn.eval(res.params);
    res.cost = 0.5 * res.residuals.squaredNorm();
    res.iterations = it;
    return res;
}

} // namespace imlambda
