#include "imlambda/dressed.hpp"

#include "imlambda/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace imlambda {

DressedBasis diagonalize(const Eigen::Matrix4d& h) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (kPhotonNumber[i] != kPhotonNumber[j] && h(i, j) != 0.0)
                throw DomainError("Hamiltonian couples different photon-number blocks");
    if (!h.isApprox(h.transpose(), 1e-14)) throw DomainError("Hamiltonian is not symmetric");

    struct Eigenpair {
        double energy;
        Eigen::Vector4d vec;
        int block;
    };
    std::array<Eigenpair, 4> pairs;
    for (int n = 0; n <= 1; ++n) {
        const int base = 2 * n;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h.block<2, 2>(base, base));
        for (int k = 0; k < 2; ++k) {
            Eigen::Vector4d v = Eigen::Vector4d::Zero();
            v.segment<2>(base) = es.eigenvectors().col(k);
            pairs[base + k] = {es.eigenvalues()(k), v, n};
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Eigenpair& a, const Eigenpair& b) { return a.energy < b.energy; });

    DressedBasis out;
    for (int j = 0; j < 4; ++j) {
        Eigen::Vector4d v = pairs[j].vec;
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;
        out.energies[j] = pairs[j].energy;
        out.basis_change.col(j) = v;
        out.photon_number[j] = pairs[j].block;
    }
    return out;
}

Eigen::Matrix4d transition_frequencies(const DressedBasis& basis) {
    Eigen::Matrix4d w;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) w(i, j) = basis.energies[i] - basis.energies[j];
    return w;
}

RateTable decay_rates(const DressedBasis& basis, const DampingRates& damping) {
    Eigen::Matrix4d adag = Eigen::Matrix4d::Zero();
    adag(kG1, kG0) = 1.0;
    adag(kE1, kE0) = 1.0;
    Eigen::Matrix4d sigma_eg = Eigen::Matrix4d::Zero();
    sigma_eg(kE0, kG0) = 1.0;
    sigma_eg(kE1, kG1) = 1.0;

    const Eigen::Matrix4d& u = basis.basis_change;
    const Eigen::Matrix4d m = u.transpose() * adag * u;
    const Eigen::Matrix4d s = u.transpose() * sigma_eg * u;
    RateTable t;
    t.amp_wg = std::sqrt(damping.kappa1) * m;
    t.amp_loss = std::sqrt(damping.kappa2) * m;
    t.amp_qb = std::sqrt(damping.gamma) * s;
    return t;
}

LabelTracking track_labels(const DressedBasis& prev, const DressedBasis& next) {
    const Eigen::Matrix4d overlap = (prev.basis_change.transpose() * next.basis_change).cwiseAbs();
    std::array<int, 4> perm{0, 1, 2, 3};
    double best = -1.0, second = -1.0;
    std::array<int, 4> best_perm = perm;
    do {
        double score = 0.0;
        for (int i = 0; i < 4; ++i) score += overlap(i, perm[i]);
        if (score > best) {
            second = best;
            best = score;
            best_perm = perm;
        } else if (score > second) {
            second = score;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    LabelTracking out;
    if (best - second < 1e-6) {
        out.ambiguous = true;
        return out;
    }
    out.perm = best_perm;
    return out;
}

DressedBasis apply_labels(const DressedBasis& next, const LabelTracking& tracking) {
    DressedBasis out;
    for (int i = 0; i < 4; ++i) {
        const int k = tracking.perm[i];
        out.energies[i] = next.energies[k];
        out.basis_change.col(i) = next.basis_change.col(k);
        out.photon_number[i] = next.photon_number[k];
    }
    return out;
}

DressedPoint dress(const DeviceModel& device, const DriveSpec& drive) {
    DressedPoint p;
    p.drive = drive;
    p.basis = diagonalize(rotating_hamiltonian(device.ren, drive, device.bare.gamma_c));
    p.rates = decay_rates(p.basis, device.damping);
    return p;
}

} // namespace imlambda
