#include "imlambda/steady_state.hpp"

#include "imlambda/errors.hpp"
#include "imlambda/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace imlambda {

namespace {

constexpr cplx kI{0.0, 1.0};

void add_channel(Tensor4<cplx>& eta1, const Eigen::Matrix4d& amp) {
    const Eigen::Matrix4d gram = amp * amp.transpose(); // gram(a,b) = sum_nu amp(a,nu) amp(b,nu)
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int m = 0; m < 4; ++m)
                for (int n = 0; n < 4; ++n) {
                    double v = amp(m, i) * amp(n, j);
                    if (i == m) v -= 0.5 * gram(j, n);
                    if (j == n) v -= 0.5 * gram(i, m);
                    eta1(i, j, m, n) += v;
                }
}

void fill_eta2(Tensor4<double>& eta2, const Eigen::Matrix4d& amp) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int m = 0; m < 4; ++m)
                for (int n = 0; n < 4; ++n) {
                    double v = 0.0;
                    if (i == m) v += amp(j, n);
                    if (j == n) v -= amp(m, i);
                    eta2(i, j, m, n) = v;
                }
}

} // namespace

CoefficientTensors build_coefficients(const DressedBasis& basis, const RateTable& rates) {
    CoefficientTensors c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c.eta1(i, j, i, j) = kI * (basis.energies[i] - basis.energies[j]);
    add_channel(c.eta1, rates.amp_wg);
    add_channel(c.eta1, rates.amp_loss);
    add_channel(c.eta1, rates.amp_qb);
    fill_eta2(c.eta2_wg, rates.amp_wg);
    fill_eta2(c.eta2_qb, rates.amp_qb);
    c.photon_number = basis.photon_number;
    c.kappa_scale = std::max({rates.kappa_wg().rowwise().sum().maxCoeff(), rates.kappa_loss().rowwise().sum().maxCoeff(),
                              rates.gamma_qb().rowwise().sum().maxCoeff()});
    return c;
}

double HarmonicState::hermiticity_error() const {
    double err = 0.0;
    for (int q = -Q; q <= Q; ++q)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) err = std::max(err, std::abs((*this)(i, j, q) - std::conj((*this)(j, i, -q))));
    return err;
}

double HarmonicState::trace_error() const {
    double err = 0.0;
    for (int q = -Q; q <= Q; ++q) {
        cplx tr = 0.0;
        for (int m = 0; m < 4; ++m) tr += (*this)(m, m, q);
        err = std::max(err, std::abs(tr - (q == 0 ? 1.0 : 0.0)));
    }
    return err;
}

HarmonicState solve_harmonics(const CoefficientTensors& coeffs, const ProbeSpec& probe, const DriveSpec& drive, int Q) {
    if (Q < 1) throw DomainError("harmonic cutoff Q must be >= 1");
    const double ep = probe.E_p();
    const double delta = probe.w_p - drive.w_d;
    const int nq = 2 * Q + 1;
    const int n = 16 * nq;
    auto idx = [Q](int q, int i, int j) { return (q + Q) * 16 + i * 4 + j; };

    Eigen::MatrixXcd sys = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    for (int q = -Q; q <= Q; ++q) {
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                const int row = idx(q, i, j);
                if (i == 0 && j == 0) {
                    for (int m = 0; m < 4; ++m) sys(row, idx(q, m, m)) = 1.0;
                    rhs(row) = (q == 0) ? 1.0 : 0.0;
                    continue;
                }
                sys(row, row) += kI * (q * delta);
                for (int m = 0; m < 4; ++m) {
                    for (int nn = 0; nn < 4; ++nn) {
                        sys(row, idx(q, m, nn)) -= coeffs.eta1(i, j, m, nn);
                        if (q + 1 <= Q) sys(row, idx(q + 1, m, nn)) += kI * ep * coeffs.eta2_wg(i, j, m, nn);
                        if (q - 1 >= -Q) sys(row, idx(q - 1, m, nn)) -= kI * ep * coeffs.eta2_wg(j, i, nn, m);
                    }
                }
            }
        }
    }

    // Row equilibration; rates span ~1e6..1e11 rad/s.
    for (int row = 0; row < n; ++row) {
        const double scale = sys.row(row).cwiseAbs().maxCoeff();
        if (scale > 0.0) {
            sys.row(row) /= scale;
            rhs(row) /= scale;
        }
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys);
    const Eigen::VectorXcd x = lu.solve(rhs);
    const double backward = (sys * x - rhs).cwiseAbs().maxCoeff() /
                            (sys.cwiseAbs().rowwise().sum().maxCoeff() * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff());
    if (!std::isfinite(backward) || backward > 1e-6) {
        std::ostringstream msg;
        msg << "harmonic balance system is singular (backward error " << backward << ")";
        throw NumericalError(msg.str(), 1.0 / lu.rcond());
    }

    HarmonicState st;
    st.Q = Q;
    st.detuning = delta;
    st.s.assign(x.data(), x.data() + n);
    for (int m = 0; m < 4; ++m) {
        cplx& p = st.at(m, m, 0);
        if (p.real() < -1e-9 || p.real() > 1.0 + 1e-9 || std::abs(p.imag()) > 1e-9)
            throw NumericalError("stationary population outside [0, 1]", 1.0 / lu.rcond());
        p = std::clamp(p.real(), 0.0, 1.0);
    }
    return st;
}

cplx reflection(const HarmonicState& state, const RateTable& rates, const ProbeSpec& probe) {
    const double ep = probe.E_p();
    if (ep == 0.0) throw DomainError("reflection coefficient undefined for zero probe amplitude");
    cplx sum = 0.0;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            if (rates.amp_wg(m, n) != 0.0) sum += rates.amp_wg(m, n) * state(n, m, -1);
    return 1.0 - kI * sum / ep;
}

cplx reflection_at(const DeviceModel& device, const DriveSpec& drive, const ProbeSpec& probe, int Q) {
    const DressedPoint p = dress(device, drive);
    const CoefficientTensors c = build_coefficients(p.basis, p.rates);
    return reflection(solve_harmonics(c, probe, drive, Q), p.rates, probe);
}

ReflectionMap sweep_reflection(const DeviceModel& device, double delta_wd, const ReflectionGrid& grid, double P_p_watts,
                               const SweepOptions& options) {
    if (grid.omega_p.empty() || grid.P_d_dbm.empty()) throw DomainError("reflection grid is empty");
    const std::size_t npd = grid.P_d_dbm.size();
    const std::size_t nw = grid.omega_p.size();

    std::vector<DressedPoint> points;
    std::vector<CoefficientTensors> coeffs;
    points.reserve(npd);
    coeffs.reserve(npd);
    for (double pd : grid.P_d_dbm) {
        points.push_back(dress(device, device.drive(delta_wd, dbm_to_watts(pd))));
        coeffs.push_back(build_coefficients(points.back().basis, points.back().rates));
    }

    ReflectionMap map;
    map.grid = grid;
    map.r.assign(npd * nw, cplx(std::nan(""), std::nan("")));
    map.flags.assign(npd * nw, kFlagOk);

    // Continuity-tracked labels for the overlay curves.
    DressedBasis tracked = points.front().basis;
    for (std::size_t ipd = 0; ipd < npd; ++ipd) {
        TransitionCurves tc;
        tc.P_d_dbm = grid.P_d_dbm[ipd];
        if (ipd > 0) {
            const LabelTracking lt = track_labels(tracked, points[ipd].basis);
            tc.label_ambiguous = lt.ambiguous;
            tracked = apply_labels(points[ipd].basis, lt);
        }
        const double wd = points[ipd].drive.w_d;
        tc.w41 = lab_transition(tracked, 3, 0, wd);
        tc.w31 = lab_transition(tracked, 2, 0, wd);
        tc.w42 = lab_transition(tracked, 3, 1, wd);
        tc.w32 = lab_transition(tracked, 2, 1, wd);
        tc.w21 = lab_transition(tracked, 1, 0, wd);
        tc.w43 = lab_transition(tracked, 3, 2, wd);
        map.curves.push_back(tc);
    }

    const auto total = static_cast<long long>(npd * nw);
    auto kernel = [&](long long k) {
        const std::size_t ipd = static_cast<std::size_t>(k) / nw;
        const std::size_t iw = static_cast<std::size_t>(k) % nw;
        const ProbeSpec probe{grid.omega_p[iw], P_p_watts};
        try {
            const HarmonicState st = solve_harmonics(coeffs[ipd], probe, points[ipd].drive, options.Q);
            map.r[k] = reflection(st, points[ipd].rates, probe);
        } catch (const NumericalError&) {
            map.flags[k] |= kFlagSolverFailure;
        }
        if (map.curves[ipd].label_ambiguous) map.flags[k] |= kFlagLabelAmbiguous;
    };

    if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long long k = 0; k < total; ++k) kernel(k);
    } else {
        for (long long k = 0; k < total; ++k) kernel(k);
    }
    return map;
}

} // namespace imlambda
