#include "common.hpp"
#include "oracles/closed_form.hpp"

#include "imlambda/dressed.hpp"

#include <doctest.h>

using namespace imlambda;

TEST_SUITE("dressed") {

TEST_CASE("uncoupled driven qubit splits by the Rabi formula") {
    BareParams b = reference_bare_params();
    b.g_ge = b.g_ef = 0.0;
    const DeviceModel d = DeviceModel::make(b, reference_damping());
    for (const double p_dbm : {-100.0, -84.0, -70.0}) {
        const DriveSpec drive = d.drive(testing::kDelta64, dbm_to_watts(p_dbm));
        const DressedBasis basis = dress(d, drive).basis;
        const double rabi = std::sqrt(b.gamma_c) * drive.E_d();
        const double split = oracle::rabi_splitting(d.ren.w_ge - drive.w_d, rabi);
        CHECK(basis.energies[1] - basis.energies[0] == doctest::Approx(split).epsilon(1e-10));
        CHECK(basis.energies[3] - basis.energies[2] == doctest::Approx(split).epsilon(1e-10));
    }
}

TEST_CASE("energies ascend and stay in their photon block") {
    const DeviceModel d = reference_device();
    const DressedBasis basis = dress(d, d.drive(testing::kDelta64, dbm_to_watts(-84.0))).basis;
    for (int k = 0; k < 3; ++k) CHECK(basis.energies[k] < basis.energies[k + 1]);
    CHECK(basis.photon_number == std::array<int, 4>{0, 0, 1, 1});
    const Eigen::Matrix4d u = basis.basis_change;
    CHECK((u.transpose() * u - Eigen::Matrix4d::Identity()).norm() < 1e-12);
    for (int j = 0; j < 4; ++j) {
        Eigen::Index imax;
        u.col(j).cwiseAbs().maxCoeff(&imax);
        CHECK(u(imax, j) > 0.0);
    }
}

TEST_CASE("eigenvectors diagonalize the Hamiltonian") {
    const DeviceModel d = reference_device();
    const DriveSpec drive = d.drive(testing::kDelta64, dbm_to_watts(-80.0));
    const Eigen::Matrix4d h = rotating_hamiltonian(d.ren, drive, d.bare.gamma_c);
    const DressedBasis basis = diagonalize(h);
    const Eigen::Matrix4d diag = basis.basis_change.transpose() * h * basis.basis_change;
    for (int i = 0; i < 4; ++i) {
        CHECK(diag(i, i) == doctest::Approx(basis.energies[i]).epsilon(1e-12));
        for (int j = 0; j < 4; ++j)
            if (i != j) CHECK(std::abs(diag(i, j)) < 1e-9 * h.norm());
    }
    const Eigen::Matrix4d w = transition_frequencies(basis);
    CHECK(w(3, 1) == basis.energies[3] - basis.energies[1]);
    CHECK(lab_transition(basis, 3, 1, drive.w_d) == doctest::Approx(w(3, 1) + drive.w_d));
}

TEST_CASE("decay-rate sum rules") {
    const DeviceModel d = reference_device();
    for (const double p_dbm : {-95.0, -84.0, -70.0}) {
        const DressedPoint p = dress(d, d.drive(testing::kDelta64, dbm_to_watts(p_dbm)));
        const Eigen::Matrix4d k = p.rates.kappa_wg(), kl = p.rates.kappa_loss(), g = p.rates.gamma_qb();
        // Each upper state holds one photon; each lower state accepts one.
        for (const int i : {2, 3}) CHECK(k(i, 0) + k(i, 1) == doctest::Approx(d.damping.kappa1).epsilon(1e-12));
        for (const int j : {0, 1}) CHECK(k(2, j) + k(3, j) == doctest::Approx(d.damping.kappa1).epsilon(1e-12));
        CHECK(kl.sum() == doctest::Approx(2.0 * d.damping.kappa2).epsilon(1e-12));
        // Qubit channel: summed over a block it returns the excited-state weight of the block.
        CHECK(g.block<2, 2>(0, 0).sum() == doctest::Approx(d.damping.gamma).epsilon(1e-12));
        CHECK(g.block<2, 2>(2, 2).sum() == doctest::Approx(d.damping.gamma).epsilon(1e-12));
        // Photon channels never connect states within a block; the qubit channel never crosses blocks.
        CHECK(k.block<2, 2>(0, 0).sum() + k.block<2, 2>(2, 2).sum() + k.block<2, 2>(0, 2).sum() == 0.0);
        CHECK(g.block<2, 2>(0, 2).sum() + g.block<2, 2>(2, 0).sum() == 0.0);
    }
}

TEST_CASE("undriven rates reduce to the bare channels") {
    const DeviceModel d = reference_device();
    const DressedPoint p = dress(d, d.drive(testing::kDelta64, 0.0));
    const Eigen::Matrix4d k = p.rates.kappa_wg();
    CHECK(k.sum() == doctest::Approx(2.0 * d.damping.kappa1).epsilon(1e-12));
    int nonzero = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) nonzero += k(i, j) > 1e-9 * d.damping.kappa1;
    CHECK(nonzero == 2);
}

TEST_CASE("label tracking follows adiabatic continuation") {
    const DeviceModel d = reference_device();
    const DressedBasis a = dress(d, d.drive(testing::kDelta64, dbm_to_watts(-84.0))).basis;
    const DressedBasis b = dress(d, d.drive(testing::kDelta64, dbm_to_watts(-83.9))).basis;
    const LabelTracking t = track_labels(a, b);
    CHECK(t.perm == std::array<int, 4>{0, 1, 2, 3});
    CHECK_FALSE(t.ambiguous);

    DressedBasis swapped = b;
    std::swap(swapped.energies[2], swapped.energies[3]);
    swapped.basis_change.col(2).swap(swapped.basis_change.col(3));
    const LabelTracking ts = track_labels(a, swapped);
    CHECK(ts.perm == std::array<int, 4>{0, 1, 3, 2});
    const DressedBasis fixed = apply_labels(swapped, ts);
    CHECK((fixed.basis_change - b.basis_change).norm() == 0.0);
}

}
