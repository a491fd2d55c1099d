#include "imlambda/matching.hpp"

#include "imlambda/errors.hpp"
#include "imlambda/optimize.hpp"
#include "imlambda/steady_state.hpp"
#include "imlambda/units.hpp"

#include <cmath>
#include <sstream>

namespace imlambda {

namespace {

void require_nested(const DeviceModel& device, double delta_wd) {
    const NestingMargins m = nesting_margin(device.ren, device.ren.w_ge + delta_wd);
    if (!m.nested()) {
        std::ostringstream msg;
        msg << "drive detuning " << angular_to_hz(delta_wd) / 1e6 << " MHz is outside the nesting regime";
        throw DomainError(msg.str());
    }
}

double imbalance(const DeviceModel& device, double delta_wd, Branch branch, double pd_dbm) {
    const DressedPoint p = dress(device, device.drive(delta_wd, dbm_to_watts(pd_dbm)));
    const int b = branch_index(branch);
    const Eigen::Matrix4d k = p.rates.kappa_wg();
    return (k(b, 0) - k(b, 1)) / device.damping.kappa1;
}

} // namespace

BalancedDrive find_balanced_drive(const DeviceModel& device, double delta_wd, Branch branch,
                                  const MatchOptions& options) {
    require_nested(device, delta_wd);
    auto f = [&](double pd) { return imbalance(device, delta_wd, branch, pd); };

    double lo = options.bracket_start_dbm;
    double flo = f(lo);
    double hi = lo;
    bool found = false;
    for (double step = 1.0; hi < options.bracket_hi_dbm; step *= 2.0) {
        const double next = std::min(hi + step, options.bracket_hi_dbm);
        const double fn = f(next);
        if ((fn > 0.0) != (flo > 0.0) || fn == 0.0) {
            lo = hi;
            flo = f(lo);
            hi = next;
            found = true;
            break;
        }
        hi = next;
    }
    if (!found) {
        // Below the starting point.
        double top = options.bracket_start_dbm;
        const double ftop = f(top);
        const double fbot = f(options.bracket_lo_dbm);
        if ((fbot > 0.0) != (ftop > 0.0)) {
            lo = options.bracket_lo_dbm;
            hi = top;
            found = true;
        }
    }
    if (!found) throw NotMatchableError("no balanced-rate drive power within the search bracket");

    const double xtol = 10.0 * std::log10(1.0 + options.power_rtol);
    BalancedDrive out;
    out.P_d_dbm = bisect(f, lo, hi, xtol);
    out.imbalance = f(out.P_d_dbm);
    return out;
}

MatchPoint find_dip(const DeviceModel& device, double delta_wd, double P_p_watts, Branch branch,
                    const MatchOptions& options) {
    const BalancedDrive bal = find_balanced_drive(device, delta_wd, branch, options);
    const int b = branch_index(branch);
    const double kappa = device.damping.kappa();

    struct Inner {
        double omega = 0.0;
        double r = 0.0;
        bool edge = false;
    };
    auto inner = [&](double pd_dbm, double span) {
        const DriveSpec drive = device.drive(delta_wd, dbm_to_watts(pd_dbm));
        const DressedPoint p = dress(device, drive);
        const CoefficientTensors c = build_coefficients(p.basis, p.rates);
        const double center = lab_transition(p.basis, b, 0, drive.w_d);
        auto g = [&](double w) {
            const ProbeSpec probe{w, P_p_watts};
            return std::abs(reflection(solve_harmonics(c, probe, drive, options.Q), p.rates, probe));
        };
        bool edge = false;
        const ScalarMin m = scan_then_golden(g, center - span * kappa, center + span * kappa, options.inner_scan,
                                             options.omega_xtol, &edge);
        return Inner{m.x, m.f, edge};
    };

    auto search = [&](double span_db, double span_kappa, bool& edge) {
        bool inner_edge = false;
        auto outer = [&](double pd) {
            const Inner in = inner(pd, span_kappa);
            inner_edge = in.edge;
            return in.r;
        };
        bool outer_edge = false;
        const ScalarMin m = scan_then_golden(outer, bal.P_d_dbm - span_db, bal.P_d_dbm + span_db, options.outer_scan,
                                             options.power_xtol_db, &outer_edge);
        const Inner best = inner(m.x, span_kappa);
        edge = outer_edge || best.edge;
        return std::pair{m.x, best};
    };

    bool edge = false;
    auto [pd, best] = search(options.dip_span_db, options.dip_span_kappa, edge);
    bool widened = false;
    if (edge) {
        widened = true;
        std::tie(pd, best) = search(2.0 * options.dip_span_db, 2.0 * options.dip_span_kappa, edge);
        if (edge) throw NumericalError("dip minimum lies on the search window boundary after widening");
    }

    MatchPoint mp;
    mp.P_d_star_dbm = pd;
    mp.P_d_star = dbm_to_watts(pd);
    mp.omega_p_star = best.omega;
    mp.r_min = best.r;
    mp.branch = branch;
    mp.P_d0_dbm = bal.P_d_dbm;
    mp.widened = widened;
    return mp;
}

std::vector<LevelPoint> level_diagram_sweep(const DeviceModel& device, const std::vector<double>& delta_wd,
                                            double P_p_watts, const MatchOptions& options, Execution execution) {
    std::vector<LevelPoint> out(delta_wd.size());
    auto kernel = [&](long long k) {
        LevelPoint& lp = out[static_cast<std::size_t>(k)];
        lp.delta_wd = delta_wd[static_cast<std::size_t>(k)];
        try {
            lp.match = find_dip(device, lp.delta_wd, P_p_watts, Branch::Upper4, options);
            const DriveSpec drive = device.drive(lp.delta_wd, lp.match.P_d_star);
            const DressedPoint p = dress(device, drive);
            lp.w31 = lab_transition(p.basis, 2, 0, drive.w_d);
            lp.w42 = lab_transition(p.basis, 3, 1, drive.w_d);
            lp.w32 = lab_transition(p.basis, 2, 1, drive.w_d);
            lp.ok = true;
        } catch (const Error& e) {
            lp.error = e.what();
        }
    };
    const auto total = static_cast<long long>(delta_wd.size());
    if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long long k = 0; k < total; ++k) kernel(k);
    } else {
        for (long long k = 0; k < total; ++k) kernel(k);
    }
    return out;
}

} // namespace imlambda
