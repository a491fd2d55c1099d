#include "common.hpp"

#include "imlambda/dressed.hpp"
#include "imlambda/errors.hpp"
#include "imlambda/matching.hpp"
#include "imlambda/spectrum.hpp"
#include "imlambda/steady_state.hpp"

#include <doctest.h>

using namespace imlambda;

namespace {

// Low-frequency device so the time-domain integration stays short.
struct Toy {
    DeviceModel d;
    DriveSpec drive;
    DressedPoint p;
    CoefficientTensors c;

    explicit Toy(double kappa2 = kTwoPi * 0.2e6, double gamma = kTwoPi * 0.5e6) {
        d.bare.gamma_c = kTwoPi * 1e3;
        d.ren.w_ge = kTwoPi * 50e6;
        d.ren.w_r = kTwoPi * 100e6;
        d.ren.chi = kTwoPi * 5e6;
        d.damping.kappa1 = kTwoPi * 4e6;
        d.damping.kappa2 = kappa2;
        d.damping.gamma = gamma;
        const double w_d = d.ren.w_ge - kTwoPi * 6e6;
        const double E_d = kTwoPi * 4e6 / std::sqrt(d.bare.gamma_c);
        drive = {w_d, E_d * E_d * kHbar * w_d};
        p = dress(d, drive);
        c = build_coefficients(p.basis, p.rates);
    }
    ProbeSpec probe(double frac) const {
        const double w = lab_transition(p.basis, 3, 0, drive.w_d);
        const double E = frac * std::sqrt(d.damping.kappa1);
        return {w, E * E * kHbar * w};
    }
    double w42() const { return lab_transition(p.basis, 3, 1, drive.w_d); }
};

std::vector<double> grid_around(double centre, double step, int half) {
    std::vector<double> w;
    for (int k = -half; k <= half; ++k) w.push_back(centre + step * k);
    return w;
}

} // namespace

TEST_SUITE("spectrum") {

TEST_CASE("resolvent agrees with time-domain regression on a toy device") {
    const Toy t;
    const ProbeSpec probe = t.probe(0.3);
    const HarmonicState s = solve_harmonics(t.c, probe, t.drive, 3);
    const auto omega = grid_around(t.w42(), kTwoPi * 50e3, 400);
    SpectrumOptions o;
    const SpectrumTrace a = regression_spectrum(s, t.p.rates, t.c, probe, t.drive, omega, o);
    o.method = SpectrumMethod::TimeDomain;
    const SpectrumTrace b = regression_spectrum(s, t.p.rates, t.c, probe, t.drive, omega, o);
    double peak = 0.0, diff = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        peak = std::max(peak, a.flux_density[k]);
        diff = std::max(diff, std::abs(a.flux_density[k] - b.flux_density[k]));
    }
    CHECK(diff < 1e-4 * peak);
    const std::pair<double, double> win{omega.front(), omega.back()};
    CHECK(conversion_efficiency(a, probe, win) == doctest::Approx(conversion_efficiency(b, probe, win)).epsilon(1e-4));
    CHECK(std::isinf(a.tau_max));
    CHECK(b.tau_max > 0.0);
    CHECK(b.n_t == o.n_t);
}

TEST_CASE("without loss every absorbed photon is re-emitted") {
    const Toy t(0.0, 0.0);
    const ProbeSpec probe = t.probe(0.3);
    const HarmonicState s = solve_harmonics(t.c, probe, t.drive, 3);
    const cplx r = reflection(s, t.p.rates, probe);
    // Integrate over the whole line with w = c + b tan(theta) so the Lorentzian tails are captured.
    const double c = kTwoPi * 100e6, b = kTwoPi * 5e6;
    const int n = 200000;
    std::vector<double> theta, omega;
    for (int k = 1; k < n; ++k) {
        theta.push_back(-M_PI / 2 + M_PI * k / n);
        omega.push_back(c + b * std::tan(theta.back()));
    }
    const SpectrumTrace tr = regression_spectrum(s, t.p.rates, t.c, probe, t.drive, omega);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < omega.size(); ++k) {
        auto f = [&](std::size_t i) { return tr.flux_density[i] * b / std::pow(std::cos(theta[i]), 2); };
        total += 0.5 * (f(k) + f(k + 1)) * (theta[k + 1] - theta[k]);
    }
    const double absorbed = probe.E_p() * probe.E_p() * (1.0 - std::norm(r));
    CHECK(absorbed > 0.01 * probe.E_p() * probe.E_p());
    CHECK(total == doctest::Approx(absorbed).epsilon(1e-3));
}

TEST_CASE("resolvent serial equals parallel and reruns are identical") {
    const Toy t;
    const ProbeSpec probe = t.probe(0.2);
    const HarmonicState s = solve_harmonics(t.c, probe, t.drive, 3);
    const auto omega = grid_around(t.w42(), kTwoPi * 100e3, 200);
    SpectrumOptions o;
    o.execution = Execution::Serial;
    const SpectrumTrace a = regression_spectrum(s, t.p.rates, t.c, probe, t.drive, omega, o);
    o.execution = Execution::Parallel;
    const SpectrumTrace b = regression_spectrum(s, t.p.rates, t.c, probe, t.drive, omega, o);
    const SpectrumTrace c = regression_spectrum(s, t.p.rates, t.c, probe, t.drive, omega, o);
    CHECK(a.S == b.S);
    CHECK(b.S == c.S);
    for (std::size_t k = 0; k < omega.size(); ++k) {
        CHECK(a.S[k] >= 0.0);
        CHECK(a.S[k] == doctest::Approx(kHbar * omega[k] * a.flux_density[k]).epsilon(1e-14));
    }
}

TEST_CASE("efficiency window must lie inside the grid") {
    const Toy t;
    const ProbeSpec probe = t.probe(0.2);
    const HarmonicState s = solve_harmonics(t.c, probe, t.drive, 3);
    const auto omega = grid_around(t.w42(), kTwoPi * 100e3, 50);
    const SpectrumTrace tr = regression_spectrum(s, t.p.rates, t.c, probe, t.drive, omega);
    CHECK_THROWS_AS(conversion_efficiency(tr, probe, {omega.front() - 1.0, omega.back()}), DomainError);
    CHECK(conversion_efficiency(tr, probe, {omega[10], omega[10]}) == 0.0);
}

TEST_CASE("default grid and window centre on w~42") {
    const DeviceModel d = reference_device();
    const DriveSpec drive = d.drive(testing::kDelta64, dbm_to_watts(-84.0));
    const DressedBasis basis = dress(d, drive).basis;
    const auto g = default_spectrum_grid(basis, drive);
    const double w42 = lab_transition(basis, 3, 1, drive.w_d);
    CHECK(g.size() == 1601);
    CHECK(g[800] == doctest::Approx(w42).epsilon(1e-15));
    CHECK(g[1] - g[0] == doctest::Approx(kTwoPi * 50e3).epsilon(1e-9));
    const auto win = default_efficiency_window(basis, drive);
    CHECK(win.second - win.first == doctest::Approx(kTwoPi * 60e6));
}

TEST_CASE("weak-probe emission line has the width of w~21 relaxation") {
    const DeviceModel d = reference_device();
    const double P_p = dbm_to_watts(-170.0);
    const MatchPoint m = find_dip(d, testing::kDelta64, P_p, Branch::Upper4);
    const DriveSpec drive = d.drive(testing::kDelta64, m.P_d_star);
    const SpectrumReport rep = spectrum_at(d, drive, {m.omega_p_star, P_p});
    const double g21 = rep.point.rates.gamma_qb()(1, 0) + rep.point.rates.kappa_wg()(1, 0) +
                       rep.point.rates.kappa_loss()(1, 0);
    const PeakInfo peak = principal_peak(rep.trace);
    CHECK(peak.fwhm == doctest::Approx(g21).epsilon(0.25));
    CHECK(std::abs(peak.omega - lab_transition(rep.point.basis, 3, 1, drive.w_d)) < kTwoPi * 2e6);
    CHECK(rep.eta > 0.8);
    CHECK(rep.eta < 1.0);
}

}
