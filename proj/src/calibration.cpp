#include "imlambda/calibration.hpp"

#include "imlambda/errors.hpp"
#include "imlambda/interpolation.hpp"
#include "imlambda/optimize.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace imlambda {

namespace {

using cd = std::complex<double>;
constexpr cd kJ{0.0, 1.0};

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "network parameter " << name << " must be positive and finite, got " << v;
        throw DomainError(msg.str());
    }
}

} // namespace

void NetworkModel::validate() const {
    require_positive(Z0, "Z0");
    require_positive(Z_cpw, "Z_cpw");
    require_positive(l, "l");
    require_positive(v_p, "v_p");
    require_positive(C_in, "C_in");
    require_positive(C_c, "C_c");
    require_positive(C_J, "C_J");
    require_positive(I0, "I0");
}

double josephson_inductance(double delta, double L_J0) {
    if (!(delta >= 0.0) || !(delta < kBesselJ1FirstZero))
        throw DomainError("junction phase amplitude outside [0, first zero of J1)");
    if (delta < 1e-8) return L_J0; // J1(d) = d/2 (1 - d^2/8 + ...)
    return delta / (2.0 * std::cyl_bessel_j(1.0, delta)) * L_J0;
}

Abcd series_impedance(cd z) {
    Abcd t;
    t << 1.0, z, 0.0, 1.0;
    return t;
}

Abcd transmission_line(double Z_c, double beta_l) {
    const double c = std::cos(beta_l), s = std::sin(beta_l);
    Abcd t;
    t << c, kJ * Z_c * s, kJ * s / Z_c, c;
    return t;
}

namespace {

Abcd port2_side(const NetworkModel& m, double omega) {
    return transmission_line(m.Z_cpw, omega / m.v_p * m.l) * series_impedance(1.0 / (kJ * omega * m.C_c));
}

} // namespace

Abcd abcd_chain(const NetworkModel& m, double omega, double delta) {
    if (!(omega > 0.0)) throw DomainError("network frequency must be positive");
    const double lj = josephson_inductance(delta, m.L_J0());
    const cd z_jj = 1.0 / (1.0 / (kJ * omega * lj) + kJ * omega * m.C_J);
    const Abcd line = transmission_line(m.Z_cpw, omega / m.v_p * m.l);
    return series_impedance(1.0 / (kJ * omega * m.C_in)) * line * series_impedance(z_jj) * port2_side(m, omega);
}

DrivePower drive_and_power(const NetworkModel& m, double omega, double delta) {
    const Abcd t = abcd_chain(m, omega, delta);
    const cd i_junction_per_amp = port2_side(m, omega)(1, 1); // current component of T (0, 1)
    if (std::abs(i_junction_per_amp) == 0.0) throw NumericalError("junction current insensitive to the port current");
    DrivePower out;
    const double i_j = 2.0 * std::cyl_bessel_j(1.0, delta) * m.I0;
    out.I2 = i_j / std::abs(i_junction_per_amp);
    // (V1, I1) = T (0, I2)
    out.I_RF = out.I2 * (t(1, 1) + t(0, 1) / m.Z0);
    out.P_p_dbm = 10.0 * std::log10(m.Z0 * std::norm(out.I_RF) / 8e-3);
    return out;
}

cd s11(const NetworkModel& m, double omega, double delta) {
    const Abcd t = abcd_chain(m, omega, delta);
    const cd den = t(0, 1) + m.Z0 * t(1, 1);
    if (std::abs(den) == 0.0) throw NumericalError("S11 denominator vanishes");
    return (t(0, 1) - m.Z0 * t(1, 1)) / den;
}

cd s11_two_port(const NetworkModel& m, double omega, double delta) {
    const Abcd t = abcd_chain(m, omega, delta);
    const cd num = t(0, 0) + t(0, 1) / m.Z0 - t(1, 0) * m.Z0 - t(1, 1);
    const cd den = t(0, 0) + t(0, 1) / m.Z0 + t(1, 0) * m.Z0 + t(1, 1);
    if (std::abs(den) == 0.0) throw NumericalError("S11 denominator vanishes");
    return num / den;
}

double phase_slope(const NetworkModel& m, double omega, double delta, double h) {
    return std::arg(s11(m, omega + h, delta) / s11(m, omega - h, delta)) / (2.0 * h);
}

double resonance_frequency(const NetworkModel& m, double delta, const ResonanceOptions& opt) {
    const int n = std::max(3, static_cast<int>(std::ceil((opt.omega_hi - opt.omega_lo) / opt.grid_step)) + 1);
    const double step = (opt.omega_hi - opt.omega_lo) / (n - 1);
    auto mag = [&](double w) { return std::abs(phase_slope(m, w, delta, opt.stencil)); };
    int best = 0;
    double vbest = -1.0;
    for (int k = 0; k < n; ++k) {
        const double v = mag(opt.omega_lo + step * k);
        if (v > vbest) {
            vbest = v;
            best = k;
        }
    }
    if (best == 0 || best == n - 1) throw NumericalError("no phase-slope extremum inside the resonance search window");
    const double a = opt.omega_lo + step * (best - 1);
    const double b = opt.omega_lo + step * (best + 1);

    // Zero of the slope's centered difference brackets the maximum.
    const double hd = opt.stencil;
    auto g = [&](double w) { return mag(w + hd) - mag(w - hd); };
    const double ga = g(a), gb = g(b);
    if (ga > 0.0 && gb < 0.0) {
        std::uintmax_t iters = 100;
        auto tol = [&](double lo, double hi) { return std::abs(hi - lo) <= opt.tol; };
        const auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
        return 0.5 * (r.first + r.second);
    }
    return golden_section([&](double w) { return -mag(w); }, a, b, opt.tol).x;
}

Backbone backbone(const NetworkModel& m, const BackboneOptions& opt) {
    m.validate();
    if (!(opt.delta_min > 0.0) || !(opt.delta_max > opt.delta_min) || opt.n_delta < 2)
        throw DomainError("backbone phase grid must satisfy 0 < delta_min < delta_max with >= 2 points");
    Backbone bb;
    ResonanceOptions ro = opt.resonance;
    ro.omega_lo = opt.linear_lo;
    ro.omega_hi = opt.linear_hi;
    bb.omega_linear = resonance_frequency(m, 0.0, ro);
    ro.omega_lo = bb.omega_linear - opt.below;
    ro.omega_hi = bb.omega_linear + opt.above;

    bb.points.resize(static_cast<std::size_t>(opt.n_delta));
    const double ratio = std::log(opt.delta_max / opt.delta_min) / (opt.n_delta - 1);
    std::vector<int> failed(bb.points.size(), 0);
    auto kernel = [&](long long k) {
        BackbonePoint& p = bb.points[static_cast<std::size_t>(k)];
        p.delta = opt.delta_min * std::exp(ratio * static_cast<double>(k));
        try {
            p.omega_r = resonance_frequency(m, p.delta, ro);
            p.P_p_dbm = drive_and_power(m, p.omega_r, p.delta).P_p_dbm;
        } catch (const Error&) {
            failed[static_cast<std::size_t>(k)] = 1;
        }
    };
    const auto total = static_cast<long long>(bb.points.size());
    if (opt.execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long k = 0; k < total; ++k) kernel(k);
    } else {
        for (long long k = 0; k < total; ++k) kernel(k);
    }
    if (std::any_of(failed.begin(), failed.end(), [](int f) { return f != 0; }))
        throw NumericalError("resonance not found for part of the backbone; reduce delta_max");
    for (std::size_t k = 1; k < bb.points.size(); ++k) {
        if (!(bb.points[k].P_p_dbm > bb.points[k - 1].P_p_dbm)) bb.folded = true;
        if (bb.points[k].omega_r > bb.points[k - 1].omega_r + 2.0 * ro.tol) bb.folded = true;
    }
    return bb;
}

void CalibDataset::validate() const {
    if (P_exp_dbm.size() != omega_r.size()) throw DomainError("calibration dataset columns differ in length");
    if (P_exp_dbm.size() < 4) throw DomainError("calibration dataset needs at least 4 rows");
    for (std::size_t k = 1; k < P_exp_dbm.size(); ++k)
        if (!(P_exp_dbm[k] > P_exp_dbm[k - 1])) throw DomainError("calibration powers must be strictly increasing");
    for (double w : omega_r)
        if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("calibration resonances must be positive");
}

std::vector<double> model_resonances(const NetworkModel& m, double x, const std::vector<double>& P_exp_dbm,
                                     const BackboneOptions& opt, int* beyond) {
    if (beyond) *beyond = 0;
    if (!(x > 0.0)) throw DomainError("power scale x must be positive");
    const Backbone bb = backbone(m, opt);
    // Single-valued branch up to the first fold, tabulated as ln(w_lin - w_r) against
    // P_p in dBm; the shift is proportional to power at low drive.
    std::vector<double> pp, ls;
    for (const auto& p : bb.points) {
        if (!pp.empty() && !(p.P_p_dbm > pp.back())) break;
        const double shift = bb.omega_linear - p.omega_r;
        if (!(shift > 0.0) || (!ls.empty() && !(std::log(shift) > ls.back()))) continue;
        pp.push_back(p.P_p_dbm);
        ls.push_back(std::log(shift));
    }
    if (pp.size() < 2) throw NumericalError("backbone has no resolvable frequency shift");
    const Pchip curve(std::move(pp), std::move(ls));
    const double scale = 10.0 * std::log10(x);
    std::vector<double> out;
    out.reserve(P_exp_dbm.size());
    for (double pe : P_exp_dbm) {
        const double p = pe + scale;
        double lshift = 0.0;
        if (p > curve.x_max()) {
            if (!beyond) {
                if (bb.folded)
                    throw NumericalError("power beyond the backbone fold (bistable regime); truncate the power range");
                throw DomainError("power above the backbone range; increase delta_max");
            }
            ++*beyond;
            const double top = curve.x_max(), h = 1e-3;
            const double slope = (curve(top) - curve(top - h)) / h;
            lshift = curve(top) + slope * (p - top);
        } else if (p < curve.x_min()) {
            lshift = curve(curve.x_min()) + std::log(10.0) * (p - curve.x_min()) / 10.0;
        } else {
            lshift = curve(p);
        }
        out.push_back(bb.omega_linear - std::exp(lshift));
    }
    return out;
}

CalibFit fit_calibration(const CalibDataset& data_in, const NetworkModel& model0, const CalibGuess& guess,
                         const CalibOptions& opt) {
    std::vector<std::size_t> order(data_in.P_exp_dbm.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return data_in.P_exp_dbm[a] < data_in.P_exp_dbm[b]; });
    CalibDataset data;
    for (std::size_t k : order) {
        data.P_exp_dbm.push_back(data_in.P_exp_dbm.at(k));
        data.omega_r.push_back(data_in.omega_r.at(k));
    }
    data.validate();
    if (!(guess.x > 0.0) || !(guess.I0 > 0.0) || !(guess.Z_cpw > 0.0))
        throw DomainError("calibration guess must be positive");

    const Eigen::Index n = static_cast<Eigen::Index>(data.omega_r.size());
    auto residual = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
        Eigen::VectorXd r(n);
        try {
            NetworkModel m = model0;
            m.I0 = p(1);
            m.Z_cpw = p(2);
            int beyond = 0;
            const std::vector<double> w = model_resonances(m, p(0), data.P_exp_dbm, opt.backbone, &beyond);
            for (Eigen::Index k = 0; k < n; ++k) r(k) = w[static_cast<std::size_t>(k)] - data.omega_r[static_cast<std::size_t>(k)];
        } catch (const Error&) {
            r.setConstant(std::numeric_limits<double>::quiet_NaN());
        }
        return r;
    };

    Eigen::VectorXd p0(3);
    p0 << guess.x, guess.I0, guess.Z_cpw;
    const LeastSquaresResult res = levenberg_marquardt(residual, p0, opt.lsq);
    {
        NetworkModel m = model0;
        m.I0 = res.params(1);
        m.Z_cpw = res.params(2);
        int beyond = 0;
        model_resonances(m, res.params(0), data.P_exp_dbm, opt.backbone, &beyond);
        if (beyond > 0)
            throw FitError("fitted powers extend past the backbone fold (bistable regime); truncate the power range",
                           {res.params(0), res.params(1), res.params(2)}, res.cost_history);
    }
    CalibFit fit;
    fit.x = res.params(0);
    fit.I0 = res.params(1);
    fit.Z_cpw = res.params(2);
    fit.residual = std::sqrt(res.residuals.squaredNorm() / static_cast<double>(n));
    fit.iterations = res.iterations;
    fit.cost_history = res.cost_history;
    return fit;
}

CalibDataset synthetic_calibration(const NetworkModel& truth, double x, const std::vector<double>& P_exp_dbm,
                                   double noise_hz, std::uint64_t seed, const BackboneOptions& opt) {
    CalibDataset d;
    d.P_exp_dbm = P_exp_dbm;
    d.omega_r = model_resonances(truth, x, P_exp_dbm, opt);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, kTwoPi * noise_hz);
    for (double& w : d.omega_r) w += noise(rng);
    return d;
}

} // namespace imlambda
