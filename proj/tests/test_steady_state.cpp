#include "common.hpp"
#include "oracles/closed_form.hpp"

#include "imlambda/dressed.hpp"
#include "imlambda/errors.hpp"
#include "imlambda/steady_state.hpp"

#include <doctest.h>

#include <random>

using namespace imlambda;

namespace {

HarmonicState solve_at(const DeviceModel& d, double P_d_dbm, double w_p, double P_p_dbm, int Q,
                       DressedPoint* out = nullptr) {
    const DriveSpec drive = d.drive(testing::kDelta64, dbm_to_watts(P_d_dbm));
    const DressedPoint p = dress(d, drive);
    if (out) *out = p;
    const ProbeSpec probe{w_p, P_p_dbm > -400.0 ? dbm_to_watts(P_p_dbm) : 0.0};
    return solve_harmonics(build_coefficients(p.basis, p.rates), probe, drive, Q);
}

} // namespace

TEST_SUITE("steady_state") {

TEST_CASE("probe-off harmonic solution equals the Lindblad null space") {
    const DeviceModel d = reference_device();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> power(-100.0, -60.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double p_dbm = power(rng);
        DressedPoint pt;
        const HarmonicState s = solve_at(d, p_dbm, kTwoPi * 10.68e9, -1000.0, 3, &pt);
        const double w_d = pt.drive.w_d;
        const oracle::Mat4 rho = oracle::steady_state(
            oracle::hamiltonian(testing::oracle_model(d), w_d, oracle::flux_amplitude(pt.drive.P_d, w_d), 0.0, 0.0),
            oracle::jumps(testing::oracle_model(d)));
        const Eigen::Matrix4cd v = pt.basis.basis_change.cast<cplx>();
        const Eigen::Matrix4cd rho_dressed = v.transpose() * rho * v;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(s(i, j, 0) - rho_dressed(j, i)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("reflection with the probe equals the co-rotating Lindblad solution") {
    const DeviceModel d = reference_device();
    for (const double p_dbm : {-90.0, -84.0, -77.0}) {
        for (const double f : {10.60e9, 10.653e9, 10.681e9, 10.70e9}) {
            const DriveSpec drive = d.drive(testing::kDelta64, dbm_to_watts(p_dbm));
            const ProbeSpec probe{kTwoPi * f, dbm_to_watts(-146.2)};
            const cplx r = reflection_at(d, drive, probe, 4);
            const cplx ref =
                oracle::reflection(testing::oracle_model(d), drive.w_d, drive.P_d, probe.w_p, probe.P_p);
            CHECK(std::abs(r - ref) < 1e-6);
        }
    }
}

TEST_CASE("undriven reflection matches the one-port formula") {
    const DeviceModel d = reference_device();
    const double k1 = d.damping.kappa1, k2 = d.damping.kappa2;
    // Qubit in its ground state: the cavity responds at w_r.
    for (const double df : {0.0, -5e6, 3e6, 20e6}) {
        const double w = d.ren.w_r + kTwoPi * df;
        const DriveSpec drive = d.drive(testing::kDelta64, 0.0);
        const cplx r = reflection_at(d, drive, {w, dbm_to_watts(-190.0)}, 3);
        CHECK(std::abs(r - oracle::one_port_cavity(k1, k2, d.ren.w_r, w)) < 1e-3);
    }
    const cplx r0 = reflection_at(d, d.drive(testing::kDelta64, 0.0), {d.ren.w_r, dbm_to_watts(-190.0)}, 3);
    CHECK(std::abs(std::abs(r0) - (k1 - k2) / (k1 + k2)) < 1e-3);
}

TEST_CASE("lossless undriven device reflects every photon") {
    DampingRates damp = reference_damping();
    damp.kappa1 += damp.kappa2;
    damp.kappa2 = 0.0;
    damp.gamma = 0.0;
    const DeviceModel d = DeviceModel::make(reference_bare_params(), damp);
    // Saturation of the one-photon truncation shifts |r| in proportion to P_p.
    double worst = 0.0;
    for (double f = 10.55e9; f <= 10.75e9; f += 2e6) {
        const cplx r = reflection_at(d, d.drive(testing::kDelta64, 0.0), {kTwoPi * f, dbm_to_watts(-210.0)});
        worst = std::max(worst, std::abs(std::abs(r) - 1.0));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("lossless driven device is passive") {
    DampingRates damp = reference_damping();
    damp.kappa1 += damp.kappa2;
    damp.kappa2 = 0.0;
    damp.gamma = 0.0;
    const DeviceModel d = DeviceModel::make(reference_bare_params(), damp);
    for (const double p_dbm : {-95.0, -84.0, -77.0})
        for (double f = 10.55e9; f <= 10.75e9; f += 10e6) {
            const DriveSpec drive = d.drive(testing::kDelta64, dbm_to_watts(p_dbm));
            CHECK(std::abs(reflection_at(d, drive, {kTwoPi * f, dbm_to_watts(-146.2)})) <= 1.0 + 1e-12);
        }
}

TEST_CASE("harmonic state is Hermitian and normalized") {
    const DeviceModel d = reference_device();
    for (const double f : {10.61e9, 10.681e9}) {
        const HarmonicState s = solve_at(d, -84.0, kTwoPi * f, -146.2, 3);
        CHECK(s.hermiticity_error() < 1e-10);
        CHECK(s.trace_error() < 1e-10);
    }
}

TEST_CASE("harmonics beyond the photon-number block vanish") {
    // Excitation-number symmetry confines s^q to q in {-1, 0, 1}; Q = 1 is exact.
    const DeviceModel d = reference_device();
    const HarmonicState s3 = solve_at(d, -84.0, kTwoPi * 10.681e9, -140.0, 3);
    const HarmonicState s1 = solve_at(d, -84.0, kTwoPi * 10.681e9, -140.0, 1);
    double outer = 0.0, diff = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            for (const int q : {-3, -2, 2, 3}) outer = std::max(outer, std::abs(s3(i, j, q)));
            for (const int q : {-1, 0, 1}) diff = std::max(diff, std::abs(s3(i, j, q) - s1(i, j, q)));
        }
    CHECK(outer < 1e-12);
    CHECK(diff < 1e-12);
}

TEST_CASE("Q 3 to 4 changes r by less than 1e-6") {
    const DeviceModel d = reference_device();
    for (const double pd : {-95.0, -84.0, -77.0})
        for (const double f : {10.60e9, 10.653e9, 10.681e9}) {
            const DriveSpec drive = d.drive(testing::kDelta64, dbm_to_watts(pd));
            const ProbeSpec probe{kTwoPi * f, dbm_to_watts(-146.2)};
            CHECK(std::abs(reflection_at(d, drive, probe, 3) - reflection_at(d, drive, probe, 4)) < 1e-6);
        }
}

TEST_CASE("sweep: passivity, shape, serial equals parallel, determinism") {
    const DeviceModel d = reference_device();
    ReflectionGrid g;
    for (int k = 0; k < 21; ++k) g.omega_p.push_back(kTwoPi * (10.55e9 + k * 10e6));
    for (int k = 0; k < 9; ++k) g.P_d_dbm.push_back(-95.0 + k * 3.0);
    const auto ser = sweep_reflection(d, testing::kDelta64, g, dbm_to_watts(-146.2), {3, Execution::Serial});
    const auto par = sweep_reflection(d, testing::kDelta64, g, dbm_to_watts(-146.2), {3, Execution::Parallel});
    const auto again = sweep_reflection(d, testing::kDelta64, g, dbm_to_watts(-146.2), {3, Execution::Parallel});
    REQUIRE(ser.r.size() == g.omega_p.size() * g.P_d_dbm.size());
    CHECK(ser.curves.size() == g.P_d_dbm.size());
    for (std::size_t k = 0; k < ser.r.size(); ++k) {
        CHECK(std::abs(ser.r[k]) <= 1.0 + 1e-12);
        CHECK(ser.r[k] == par.r[k]);
        CHECK(par.r[k] == again.r[k]);
        CHECK(ser.flags[k] == kFlagOk);
    }
}

TEST_CASE("single-point sweep") {
    const DeviceModel d = reference_device();
    const ReflectionGrid g{{kTwoPi * 10.681e9}, {-84.0}};
    const auto m = sweep_reflection(d, testing::kDelta64, g, dbm_to_watts(-146.2));
    REQUIRE(m.r.size() == 1);
    CHECK(m.r[0] == reflection_at(d, d.drive(testing::kDelta64, dbm_to_watts(-84.0)),
                                  {kTwoPi * 10.681e9, dbm_to_watts(-146.2)}));
}

TEST_CASE("zero probe amplitude has no reflection coefficient") {
    const DeviceModel d = reference_device();
    const DriveSpec drive = d.drive(testing::kDelta64, dbm_to_watts(-84.0));
    CHECK_THROWS_AS(reflection_at(d, drive, {kTwoPi * 10.681e9, 0.0}), DomainError);
}

}
