#include "imlambda/spectrum.hpp"

#include "imlambda/errors.hpp"
#include "imlambda/units.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace imlambda {

namespace {

constexpr cplx kI{0.0, 1.0};
using Vec16 = Eigen::Matrix<cplx, 16, 1>;
using Mat16 = Eigen::Matrix<cplx, 16, 16>;

int phase(const CoefficientTensors& c, int i, int j) { return c.photon_number[i] - c.photon_number[j]; }

// y_ij in the excitation frame from the harmonic amplitudes.
Vec16 stationary_vector(const HarmonicState& st, const CoefficientTensors& c) {
    Vec16 y;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) y(i * 4 + j) = st(i, j, phase(c, i, j));
    return y;
}

// sum_uv A[u][v] (delta_vi x_uj - x_uv x_ij): connected product-rule initial value.
Vec16 weighted_initial(const Vec16& x, const Eigen::Matrix4d& amp) {
    Vec16 c0 = Vec16::Zero();
    for (int u = 0; u < 4; ++u)
        for (int v = 0; v < 4; ++v) {
            const double w = amp(u, v);
            if (w == 0.0) continue;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    cplx val = -x(u * 4 + v) * x(i * 4 + j);
                    if (v == i) val += x(u * 4 + j);
                    c0(i * 4 + j) += w * val;
                }
        }
    return c0;
}

cplx project_output(const Vec16& x, const Eigen::Matrix4d& amp) {
    cplx sum = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (amp(j, i) != 0.0) sum += amp(j, i) * x(i * 4 + j);
    return sum;
}

double slowest_rate(const RateTable& rates) {
    double kappa = 0.0;
    const Eigen::Matrix4d total = rates.kappa_wg() + rates.kappa_loss() + rates.gamma_qb();
    kappa = total.maxCoeff();
    double g21 = rates.gamma_qb()(1, 0) + rates.kappa_wg()(1, 0) + rates.kappa_loss()(1, 0);
    double lo = g21 > 0.0 ? std::min(g21, kappa) : kappa;
    if (!(lo > 0.0)) throw DomainError("no dissipation; correlators do not decay");
    return lo;
}

using OdeState = std::vector<cplx>;

CorrelatorSet integrate_correlators(const HarmonicState& st, const RateTable& rates, const CoefficientTensors& c,
                                    const ProbeSpec& probe, const SpectrumOptions& opt, double tau_max) {
    const double delta = st.detuning;
    if (delta == 0.0 && opt.n_t > 1) throw DomainError("stationary-time averaging needs a nonzero probe detuning");
    const double ep = probe.E_p();
    const double period = delta != 0.0 ? kTwoPi / std::abs(delta) : tau_max;
    const double dtau = period / opt.samples_per_period;
    const auto n_tau = static_cast<std::size_t>(std::ceil(tau_max / dtau)) + 1;

    Mat16 l1, l2, l3;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int m = 0; m < 4; ++m)
                for (int n = 0; n < 4; ++n) {
                    l1(i * 4 + j, m * 4 + n) = c.eta1(i, j, m, n);
                    l2(i * 4 + j, m * 4 + n) = -kI * ep * c.eta2_wg(i, j, m, n);
                    l3(i * 4 + j, m * 4 + n) = kI * ep * c.eta2_wg(j, i, n, m);
                }

    const int n_t = std::max(1, opt.n_t);
    std::vector<std::vector<cplx>> per_phase(static_cast<std::size_t>(n_t), std::vector<cplx>(n_tau));
    std::vector<double> init_norm(static_cast<std::size_t>(n_t)), final_norm(static_cast<std::size_t>(n_t));

    auto run = [&](int k) {
        const double t0 = period * k / n_t;
        Vec16 x;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                cplx v = 0.0;
                for (int q = -st.Q; q <= st.Q; ++q) v += st(i, j, q) * std::exp(kI * (q * delta * t0));
                x(i * 4 + j) = v;
            }
        const Vec16 c0 = weighted_initial(x, rates.amp_wg);
        OdeState y(c0.data(), c0.data() + 16);
        auto rhs = [&](const OdeState& s, OdeState& ds, double tau) {
            const double tt = t0 + tau;
            Eigen::Map<const Vec16> sv(s.data());
            Eigen::Map<Vec16> dv(ds.data());
            dv = l1 * sv + std::exp(-kI * (delta * tt)) * (l2 * sv) + std::exp(kI * (delta * tt)) * (l3 * sv);
        };
        const double atol = opt.rtol * std::max(c0.cwiseAbs().maxCoeff(), 1e-300);
        auto stepper = boost::numeric::odeint::make_dense_output(atol, opt.rtol,
                                                                 boost::numeric::odeint::runge_kutta_dopri5<OdeState>());
        std::size_t idx = 0;
        auto& out = per_phase[static_cast<std::size_t>(k)];
        boost::numeric::odeint::integrate_n_steps(stepper, rhs, y, 0.0, dtau, n_tau - 1,
                                                  [&](const OdeState& s, double) {
                                                      Eigen::Map<const Vec16> sv(s.data());
                                                      out[idx++] = project_output(sv, rates.amp_wg);
                                                  });
        init_norm[static_cast<std::size_t>(k)] = c0.cwiseAbs().maxCoeff();
        final_norm[static_cast<std::size_t>(k)] = Eigen::Map<const Vec16>(y.data()).cwiseAbs().maxCoeff();
    };

    if (opt.execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (int k = 0; k < n_t; ++k) run(k);
    } else {
        for (int k = 0; k < n_t; ++k) run(k);
    }

    CorrelatorSet set;
    set.t_phases = n_t;
    set.tau.resize(n_tau);
    set.c.assign(n_tau, 0.0);
    for (std::size_t s = 0; s < n_tau; ++s) {
        set.tau[s] = dtau * static_cast<double>(s);
        for (int k = 0; k < n_t; ++k) set.c[s] += per_phase[static_cast<std::size_t>(k)][s];
        set.c[s] /= static_cast<double>(n_t);
    }
    set.initial_norm = *std::max_element(init_norm.begin(), init_norm.end());
    set.final_norm = *std::max_element(final_norm.begin(), final_norm.end());
    return set;
}

} // namespace

Mat16 excitation_frame_generator(const CoefficientTensors& c, double E_p, double detuning) {
    Mat16 m = Mat16::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const int pij = phase(c, i, j);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const int pab = phase(c, a, b);
                    cplx v = 0.0;
                    if (pab == pij) v += c.eta1(i, j, a, b);
                    if (pab == pij + 1) v += -kI * E_p * c.eta2_wg(i, j, a, b);
                    if (pab == pij - 1) v += kI * E_p * c.eta2_wg(j, i, b, a);
                    m(i * 4 + j, a * 4 + b) = v;
                }
            m(i * 4 + j, i * 4 + j) -= kI * (pij * detuning);
        }
    return m;
}

CorrelatorSet regression_correlators(const HarmonicState& state, const RateTable& rates, const CoefficientTensors& coeffs,
                                     const ProbeSpec& probe, const SpectrumOptions& options) {
    double tau_max = options.tau_max > 0.0 ? options.tau_max : 10.0 / slowest_rate(rates);
    for (int attempt = 0; attempt < 4; ++attempt) {
        CorrelatorSet set = integrate_correlators(state, rates, coeffs, probe, options, tau_max);
        if (set.initial_norm == 0.0 || set.final_norm < 1e-3 * set.initial_norm) return set;
        if (options.tau_max > 0.0) break;
        tau_max *= 2.0;
    }
    throw NumericalError("correlators have not decayed at tau_max; increase tau_max");
}

SpectrumTrace regression_spectrum(const HarmonicState& state, const RateTable& rates, const CoefficientTensors& coeffs,
                                  const ProbeSpec& probe, const DriveSpec& drive, const std::vector<double>& omega,
                                  const SpectrumOptions& options) {
    SpectrumTrace tr;
    tr.omega = omega;
    tr.Q = state.Q;
    const std::size_t n = omega.size();
    std::vector<double> re(n, 0.0);

    if (options.method == SpectrumMethod::Resolvent) {
        tr.tau_max = std::numeric_limits<double>::infinity();
        tr.n_t = 1;
        const Mat16 gen = excitation_frame_generator(coeffs, probe.E_p(), state.detuning);
        Vec16 rhs = -weighted_initial(stationary_vector(state, coeffs), rates.amp_wg);
        rhs(0) = 0.0;
        const double scale = gen.cwiseAbs().maxCoeff();
        auto kernel = [&](long long k) {
            const double z = omega[static_cast<std::size_t>(k)] - probe.w_p;
            Mat16 sys = gen;
            sys.diagonal().array() += kI * z;
            sys.row(0).setZero();
            for (int m = 0; m < 4; ++m) sys(0, m * 4 + m) = scale;
            const Vec16 x = sys.partialPivLu().solve(rhs);
            re[static_cast<std::size_t>(k)] = project_output(x, rates.amp_wg).real();
        };
        const auto total = static_cast<long long>(n);
        if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
            for (long long k = 0; k < total; ++k) kernel(k);
        } else {
            for (long long k = 0; k < total; ++k) kernel(k);
        }
    } else {
        const CorrelatorSet set = regression_correlators(state, rates, coeffs, probe, options);
        tr.tau_max = set.tau.back();
        tr.n_t = set.t_phases;
        const double dtau = set.tau.size() > 1 ? set.tau[1] - set.tau[0] : 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double w = omega[k] - drive.w_d;
            cplx acc = 0.0;
            for (std::size_t s = 0; s < set.tau.size(); ++s) {
                const double wt = (s == 0 || s + 1 == set.tau.size()) ? 0.5 : 1.0;
                acc += wt * std::exp(kI * (w * set.tau[s])) * set.c[s];
            }
            re[k] = (acc * dtau).real();
        }
    }

    tr.S.resize(n);
    tr.flux_density.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double flux = std::max(0.0, re[k] / std::numbers::pi);
        tr.flux_density[k] = flux;
        tr.S[k] = kHbar * omega[k] * flux;
    }
    return tr;
}

std::vector<double> default_spectrum_grid(const DressedBasis& basis, const DriveSpec& drive) {
    const double center = lab_transition(basis, 3, 1, drive.w_d);
    const double half = kTwoPi * 40e6, step = kTwoPi * 50e3;
    const int n = static_cast<int>(std::lround(2.0 * half / step));
    std::vector<double> grid(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) grid[static_cast<std::size_t>(k)] = center - half + step * k;
    return grid;
}

std::pair<double, double> default_efficiency_window(const DressedBasis& basis, const DriveSpec& drive) {
    const double center = lab_transition(basis, 3, 1, drive.w_d);
    return {center - kTwoPi * 30e6, center + kTwoPi * 30e6};
}

double conversion_efficiency(const SpectrumTrace& trace, const ProbeSpec& probe, std::pair<double, double> window) {
    const auto& w = trace.omega;
    const auto& f = trace.flux_density;
    if (w.size() < 2) throw DomainError("spectrum grid has fewer than two points");
    auto [lo, hi] = window;
    if (lo > hi) std::swap(lo, hi);
    if (lo < w.front() || hi > w.back()) throw DomainError("efficiency window lies outside the spectrum grid");
    const double ep2 = photon_flux(probe.P_p, probe.w_p);
    if (!(ep2 > 0.0)) throw DomainError("efficiency undefined for zero probe power");

    auto interp = [&](double x) {
        auto it = std::upper_bound(w.begin(), w.end(), x);
        if (it == w.end()) return f.back();
        const std::size_t k = static_cast<std::size_t>(it - w.begin());
        if (k == 0) return f.front();
        const double t = (x - w[k - 1]) / (w[k] - w[k - 1]);
        return f[k - 1] + t * (f[k] - f[k - 1]);
    };
    double sum = 0.0;
    double x0 = lo, y0 = interp(lo);
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] <= lo) continue;
        if (w[k] >= hi) break;
        sum += 0.5 * (y0 + f[k]) * (w[k] - x0);
        x0 = w[k];
        y0 = f[k];
    }
    sum += 0.5 * (y0 + interp(hi)) * (hi - x0);
    return sum / ep2;
}

PeakInfo principal_peak(const SpectrumTrace& trace) {
    const auto& w = trace.omega;
    const auto& s = trace.S;
    if (w.size() < 3) throw DomainError("spectrum grid too small for peak analysis");
    const std::size_t k = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
    PeakInfo p;
    p.omega = w[k];
    p.value = s[k];
    if (k > 0 && k + 1 < w.size()) {
        const double denom = s[k - 1] - 2.0 * s[k] + s[k + 1];
        if (denom < 0.0) {
            const double off = 0.5 * (s[k - 1] - s[k + 1]) / denom;
            p.omega = w[k] + off * 0.5 * (w[k + 1] - w[k - 1]);
            p.value = s[k] - 0.25 * (s[k - 1] - s[k + 1]) * off;
        }
    }
    const double half = 0.5 * s[k];
    std::size_t l = k, r = k;
    while (l > 0 && s[l] > half) --l;
    while (r + 1 < w.size() && s[r] > half) ++r;
    if (s[l] > half || s[r] > half) return p; // half maximum not reached on the grid
    const double wl = w[l] + (half - s[l]) / (s[l + 1] - s[l]) * (w[l + 1] - w[l]);
    const double wr = w[r - 1] + (half - s[r - 1]) / (s[r] - s[r - 1]) * (w[r] - w[r - 1]);
    p.fwhm = wr - wl;
    return p;
}

SpectrumReport spectrum_at(const DeviceModel& device, const DriveSpec& drive, const ProbeSpec& probe,
                           const SpectrumOptions& options, int Q) {
    SpectrumReport rep;
    rep.point = dress(device, drive);
    const CoefficientTensors c = build_coefficients(rep.point.basis, rep.point.rates);
    const HarmonicState st = solve_harmonics(c, probe, drive, Q);
    rep.trace = regression_spectrum(st, rep.point.rates, c, probe, drive, default_spectrum_grid(rep.point.basis, drive),
                                    options);
    rep.window = default_efficiency_window(rep.point.basis, drive);
    rep.eta = conversion_efficiency(rep.trace, probe, rep.window);
    return rep;
}

} // namespace imlambda
