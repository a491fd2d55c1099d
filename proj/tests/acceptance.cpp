// Acceptance report: one PASS/FAIL line per criterion.

#include "oracles/closed_form.hpp"
#include "oracles/lindblad.hpp"

#include "imlambda/calibration.hpp"
#include "imlambda/csv.hpp"
#include "imlambda/dressed.hpp"
#include "imlambda/jpa.hpp"
#include "imlambda/matching.hpp"
#include "imlambda/spectrum.hpp"
#include "imlambda/steady_state.hpp"
#include "imlambda/units.hpp"

#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace imlambda;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

void guarded(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double ghz(double w) { return angular_to_hz(w) / 1e9; }
double mhz(double w) { return angular_to_hz(w) / 1e6; }

oracle::Model oracle_model(const DeviceModel& d) {
    return {d.ren.w_ge, d.ren.w_r, d.ren.chi, d.damping.kappa1, d.damping.kappa2, d.damping.gamma, d.bare.gamma_c};
}

const double kDelta = -kTwoPi * 64e6;
const double kProbe = dbm_to_watts(-146.2);

ReflectionGrid figure_grid() {
    ReflectionGrid g;
    for (int k = 0; k <= 200; ++k) g.omega_p.push_back(kTwoPi * (10.55e9 + k * 1e6));
    for (int k = 0; k <= 100; ++k) g.P_d_dbm.push_back(-95.0 + 0.25 * k);
    return g;
}

} // namespace

int main() {
    const DeviceModel dev = reference_device();

    guarded(1, [&] {
        const RenormalizedParams& r = dev.ren;
        const bool ok = std::abs(angular_to_hz(r.w_ge) - 5.461e9) < 1e6 && std::abs(angular_to_hz(r.w_r) - 10.678e9) < 1e6 &&
                        std::abs(angular_to_hz(2.0 * r.chi) - 0.080e9) < 1e6;
        report(1, ok, fmt("(w_ge, w_r, 2chi)/2pi = (%.6f, %.6f, %.6f) GHz", ghz(r.w_ge), ghz(r.w_r), ghz(2.0 * r.chi)));
    });

    guarded(2, [&] {
        const BalancedDrive b4 = find_balanced_drive(dev, kDelta, Branch::Upper4);
        const BalancedDrive b3 = find_balanced_drive(dev, kDelta, Branch::Upper3);
        const bool same = std::abs(b4.P_d_dbm - b3.P_d_dbm) < 0.05;
        const bool ok = std::abs(b4.P_d_dbm + 80.6) <= 0.3 && same;
        report(2, ok, fmt("P_d0 = %.4f dBm (branch 4), %.4f dBm (branch 3); target -80.6 +- 0.3", b4.P_d_dbm,
                          b3.P_d_dbm));
    });

    ReflectionMap map;
    bool have_map = false;
    guarded(3, [&] {
        map = sweep_reflection(dev, kDelta, figure_grid(), kProbe);
        have_map = true;
        const auto& g = map.grid;
        double best = 2.0, best_w = 0.0, best_p = 0.0, best3 = 2.0, best3_w = 0.0, best3_p = 0.0;
        for (std::size_t ip = 0; ip < g.P_d_dbm.size(); ++ip)
            for (std::size_t iw = 0; iw < g.omega_p.size(); ++iw) {
                const double a = std::abs(map.r[map.index(ip, iw)]);
                const double p = g.P_d_dbm[ip];
                if (p < -80.0 && a < best) best = a, best_w = g.omega_p[iw], best_p = p;
                if (p >= -80.0 && a < best3) best3 = a, best3_w = g.omega_p[iw], best3_p = p;
            }
        const DriveSpec d3 = dev.drive(kDelta, dbm_to_watts(best3_p));
        const double w31 = lab_transition(dress(dev, d3).basis, 2, 0, d3.w_d);
        const bool main_ok = best <= 0.1 && std::abs(angular_to_hz(best_w) - 10.681e9) <= 5e6 && std::abs(best_p + 84.0) <= 2.0;
        const bool second_ok = best3 <= 0.1 && std::abs(best3_p + 77.0) <= 2.0 && std::abs(best3_w - w31) < dev.damping.kappa();
        report(3, main_ok && second_ok,
               fmt("grid min |r| = %.4f at %.4f GHz, %.2f dBm", best, ghz(best_w), best_p) +
                   fmt("; second dip |r| = %.4f at %.2f dBm, %.2f MHz from w~31", best3, best3_p, mhz(best3_w - w31)));
    });

    guarded(4, [&] {
        if (!have_map) throw std::runtime_error("reflection map unavailable");
        double worst = 2.0, worst_w = 0.0, worst_p = 0.0;
        for (std::size_t ip = 0; ip < map.grid.P_d_dbm.size(); ++ip) {
            if (!(map.grid.P_d_dbm[ip] < -90.0)) continue;
            for (std::size_t iw = 0; iw < map.grid.omega_p.size(); ++iw) {
                const double a = std::abs(map.r[map.index(ip, iw)]);
                if (a < worst) worst = a, worst_w = map.grid.omega_p[iw], worst_p = map.grid.P_d_dbm[ip];
            }
        }
        report(4, worst > 0.95, fmt("min |r| for P_d < -90 dBm = %.4f at %.4f GHz, %.2f dBm", worst, ghz(worst_w), worst_p));
    });

    guarded(5, [&] {
        const double k1 = dev.damping.kappa1, k2 = dev.damping.kappa2;
        const ProbeSpec weak{dev.ren.w_r, dbm_to_watts(-190.0)};
        const cplx r = reflection_at(dev, dev.drive(kDelta, 0.0), weak);
        const cplx ref = oracle::one_port_cavity(k1, k2, dev.ren.w_r, dev.ren.w_r);
        DampingRates lossless = dev.damping;
        lossless.kappa1 += lossless.kappa2;
        lossless.kappa2 = lossless.gamma = 0.0;
        const DeviceModel dl = DeviceModel::make(dev.bare, lossless);
        double worst = 0.0;
        for (double f = 10.50e9; f <= 10.85e9; f += 1e6)
            worst = std::max(worst, std::abs(std::abs(reflection_at(dl, dl.drive(kDelta, 0.0),
                                                                     {kTwoPi * f, dbm_to_watts(-210.0)})) - 1.0));
        const bool ok = std::abs(std::abs(r) - 0.9) < 1e-3 && std::abs(r - ref) < 1e-3 && worst < 1e-6;
        report(5, ok, fmt("|r(w_r)| = %.6f, |r - one-port| = %.2e; lossless max ||r| - 1| = %.2e", std::abs(r),
                          std::abs(r - ref), worst));
    });

    guarded(6, [&] {
        auto eta_at = [&](double P_p_dbm, double* peak_offset) {
            const double P = dbm_to_watts(P_p_dbm);
            const MatchPoint m = find_dip(dev, kDelta, P, Branch::Upper4);
            const DriveSpec drive = dev.drive(kDelta, m.P_d_star);
            const SpectrumReport rep = spectrum_at(dev, drive, {m.omega_p_star, P});
            if (peak_offset)
                *peak_offset = principal_peak(rep.trace).omega - lab_transition(rep.point.basis, 3, 1, drive.w_d);
            return rep.eta;
        };
        double offset = 0.0;
        const double e146 = eta_at(-146.2, &offset);
        const double e151 = eta_at(-151.2, nullptr);
        const double e156 = eta_at(-156.2, nullptr);
        const double weak = eta_at(-180.0, nullptr);
        const bool peak_ok = std::abs(offset) < kTwoPi * 2e6;
        const bool eta_ok = std::abs(e146 - 0.677) <= 0.03;
        const bool mono = e156 > e151 && e151 > e146;
        const bool weak_ok = std::abs(weak - 0.95) <= 0.05 * 0.95;
        report(6, peak_ok && eta_ok && mono && weak_ok,
               fmt("peak - w~42 = %.3f MHz; eta(-146.2) = %.4f; eta(-151.2, -156.2) = %.4f, %.4f", mhz(offset), e146,
                   e151, e156) +
                   fmt("; weak-probe eta(-180) = %.4f (target 0.95 +- 5%%)", weak));
    });

    guarded(7, [&] {
        std::vector<double> deltas;
        for (int k = 0; k < 15; ++k) deltas.push_back(-kTwoPi * (76e6 - 2e6 * k));
        const auto pts = level_diagram_sweep(dev, deltas, dbm_to_watts(-141.2));
        bool ok = true;
        double w32_min = 1e300, w32_max = -1e300;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            ok = ok && pts[k].ok;
            if (!pts[k].ok) continue;
            w32_min = std::min(w32_min, pts[k].w32);
            w32_max = std::max(w32_max, pts[k].w32);
            // deltas run from -76 to -48 MHz, so |delta| decreases along the sweep.
            if (k > 0 && pts[k - 1].ok) ok = ok && pts[k].w31 < pts[k - 1].w31 && pts[k].w42 > pts[k - 1].w42;
        }
        const LevelPoint& mid = pts[6];
        const bool at64 = mid.ok && std::abs(angular_to_hz(mid.w31) - 10.659e9) < 5e6 &&
                          std::abs(angular_to_hz(mid.w42) - 10.615e9) < 5e6 &&
                          std::abs(angular_to_hz(mid.w32) - 10.593e9) < 5e6;
        const bool flat = w32_max - w32_min < kTwoPi * 3e6;
        report(7, ok && at64 && flat,
               fmt("at -64 MHz (w~31, w~42, w~32) = (%.4f, %.4f, %.4f) GHz", ghz(mid.w31), ghz(mid.w42), ghz(mid.w32)) +
                   fmt("; w~32 span %.3f MHz; monotone ", mhz(w32_max - w32_min)) + (ok ? "yes" : "no"));
    });

    guarded(8, [&] {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> power(-100.0, -60.0);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const DriveSpec drive = dev.drive(kDelta, dbm_to_watts(power(rng)));
            const DressedPoint p = dress(dev, drive);
            const HarmonicState s = solve_harmonics(build_coefficients(p.basis, p.rates), {kTwoPi * 10.68e9, 0.0}, drive);
            const oracle::Mat4 rho = oracle::steady_state(
                oracle::hamiltonian(oracle_model(dev), drive.w_d, oracle::flux_amplitude(drive.P_d, drive.w_d), 0.0, 0.0),
                oracle::jumps(oracle_model(dev)));
            const Eigen::Matrix4cd v = p.basis.basis_change.cast<cplx>();
            const Eigen::Matrix4cd rd = v.transpose() * rho * v;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(s(i, j, 0) - rd(j, i)));
        }
        report(8, worst < 1e-8, fmt("max |s0 - null-space| over 20 drive powers = %.2e", worst));
    });

    guarded(9, [&] {
        const NetworkModel truth;
        std::vector<double> P;
        for (int k = 0; k < 29; ++k) P.push_back(-140.0 + k);
        const CalibDataset data = synthetic_calibration(truth, 0.998, P, 10e3, 1);
        const CalibFit fit = fit_calibration(data, truth, CalibGuess{});
        const bool fit_ok = std::abs(fit.x / 0.998 - 1.0) < 0.01 && std::abs(fit.I0 / 0.689e-6 - 1.0) < 0.01 &&
                            std::abs(fit.Z_cpw / 52.1 - 1.0) < 0.01;
        const Backbone bb = backbone(truth);
        double det_err = 0.0, s_err = 0.0;
        for (const BackbonePoint& p : bb.points)
            for (const double dw : {-kTwoPi * 100e6, 0.0, kTwoPi * 100e6}) {
                det_err = std::max(det_err, std::abs(abcd_chain(truth, p.omega_r + dw, p.delta).determinant() - 1.0));
                s_err = std::max(s_err, std::abs(std::abs(s11(truth, p.omega_r + dw, p.delta)) - 1.0));
            }
        report(9, fit_ok && det_err < 1e-9 && s_err < 1e-9,
               fmt("fit (x, I0, Z) = (%.5f, %.4f uA, %.3f ohm)", fit.x, fit.I0 * 1e6, fit.Z_cpw) +
                   fmt("; max |det - 1| = %.1e, max ||S11| - 1| = %.1e", det_err, s_err));
    });

    guarded(10, [&] {
        const MeasuredEfficiency e =
            measured_efficiency(1.77e-18, std::pow(10.0, -17.62), kTwoPi * 10.681e9, kTwoPi * 10.6157e9);
        JpaModel m;
        m.omega_a = kTwoPi * 21.229e9;
        m.B = kTwoPi * 10e3;
        m.G_s = m.G_i = Gain::from_db(21.0);
        LorentzianSignal s{kTwoPi * 10.6157e9, kTwoPi * 1.21e6, 0.0};
        s.S0 = 1.77e-18 / (kTwoPi * s.delta_omega / 4.0);
        JpaTrace t;
        for (int k = 0; k < 2901; ++k) t.omega.push_back(kTwoPi * (10.600e9 + k * 10e3));
        t.P_out = jpa_output(m, s, t.omega);
        std::mt19937_64 rng(1);
        std::normal_distribution<double> noise(0.0, 0.01);
        for (double& p : t.P_out) p *= 1.0 + noise(rng);
        const JpaFit fit = fit_jpa_spectrum(t, m, guess_signal(t, m, assign_signal_peak(t, m, s.omega_s)));
        const double dw = std::abs(fit.signal.delta_omega / s.delta_omega - 1.0);
        const double dp = std::abs(fit.signal.power() / s.power() - 1.0);
        const double dc = std::abs(fit.signal.omega_s - s.omega_s) / s.delta_omega;
        report(10, std::abs(e.eta - 0.742) <= 0.005 && dw < 0.02 && dp < 0.02 && dc < 0.02,
               fmt("eta = %.4f [%.3f, %.3f]", e.eta, e.lower, e.upper) +
                   fmt("; fit errors: width %.2e, power %.2e, centre %.2e linewidths", dw, dp, dc));
    });

    guarded(11, [&] {
        // Hermiticity, trace and Q convergence on a sample of operating points.
        double herm = 0.0, trace = 0.0, qconv = 0.0;
        for (const double pd : {-95.0, -88.0, -84.0, -80.0, -77.0, -72.0})
            for (const double f : {10.56e9, 10.60e9, 10.615e9, 10.653e9, 10.681e9, 10.72e9}) {
                const DriveSpec drive = dev.drive(kDelta, dbm_to_watts(pd));
                const DressedPoint p = dress(dev, drive);
                const CoefficientTensors c = build_coefficients(p.basis, p.rates);
                const ProbeSpec probe{kTwoPi * f, kProbe};
                const HarmonicState s3 = solve_harmonics(c, probe, drive, 3);
                const HarmonicState s4 = solve_harmonics(c, probe, drive, 4);
                herm = std::max(herm, s3.hermiticity_error());
                trace = std::max(trace, s3.trace_error());
                qconv = std::max(qconv, std::abs(reflection(s3, p.rates, probe) - reflection(s4, p.rates, probe)));
            }
        // Decay-rate sum rules.
        double sum_rule = 0.0;
        for (const double pd : {-95.0, -84.0, -70.0}) {
            const Eigen::Matrix4d k = dress(dev, dev.drive(kDelta, dbm_to_watts(pd))).rates.kappa_wg();
            for (const int i : {2, 3}) sum_rule = std::max(sum_rule, std::abs(k(i, 0) + k(i, 1) - dev.damping.kappa1));
            for (const int j : {0, 1}) sum_rule = std::max(sum_rule, std::abs(k(2, j) + k(3, j) - dev.damping.kappa1));
        }
        sum_rule /= dev.damping.kappa1;
        // Passivity over the full map; determinism of serial, parallel and rerun output.
        double rmax = 0.0;
        for (const cplx& r : map.r) rmax = std::max(rmax, std::abs(r));
        ReflectionGrid small;
        for (int k = 0; k < 21; ++k) small.omega_p.push_back(kTwoPi * (10.60e9 + k * 5e6));
        small.P_d_dbm = {-90.0, -84.0, -78.0};
        auto dump = [&](Execution e) {
            const ReflectionMap m = sweep_reflection(dev, kDelta, small, kProbe, {3, e});
            CsvTable t;
            t.columns = {"re", "im"};
            for (const cplx& r : m.r) t.rows.push_back({r.real(), r.imag()});
            return to_csv(t);
        };
        const std::string a = dump(Execution::Serial), b = dump(Execution::Parallel), c = dump(Execution::Parallel);
        const bool det = a == b && b == c;
        const bool ok = have_map && herm < 1e-10 && trace < 1e-10 && qconv < 1e-6 && sum_rule < 1e-12 &&
                        rmax <= 1.0 + 1e-12 && det;
        report(11, ok,
               fmt("hermiticity %.1e, trace %.1e, |r_Q3 - r_Q4| %.1e, sum rule %.1e", herm, trace, qconv, sum_rule) +
                   fmt("; max |r| %.6f; deterministic ", rmax) + (det ? "yes" : "no"));
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
