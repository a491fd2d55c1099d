#pragma once

#include "imlambda/system_model.hpp"

#include <Eigen/Dense>

#include <array>

namespace imlambda {

// Dressed states are indexed 0..3 in ascending energy; index k is the state
// conventionally labelled |k+1~>.
struct DressedBasis {
    std::array<double, 4> energies{};   // rad/s, rotating frame
    Eigen::Matrix4d basis_change;       // column j = |j~> in the bare basis
    std::array<int, 4> photon_number{}; // block each dressed state lives in
};

/// Numerically diagonalizes the block-diagonal rotating-frame Hamiltonian.
/// Each photon-number block is solved separately so states never mix blocks;
/// in every column, the entry of largest magnitude is made positive.
DressedBasis diagonalize(const Eigen::Matrix4d& h);

/// w(i,j) = w~_i - w~_j in the rotating frame.
Eigen::Matrix4d transition_frequencies(const DressedBasis& basis);

/// Laboratory-frame transition frequency w~_ij + w_d.
inline double lab_transition(const DressedBasis& basis, int i, int j, double w_d) {
    return basis.energies[i] - basis.energies[j] + w_d;
}

// Signed transition amplitudes of the three damping channels. The rate of
// |i~> -> |j~> through a channel is the square of the corresponding entry.
struct RateTable {
    Eigen::Matrix4d amp_wg;   // sqrt(kappa1) <i~|a^dag|j~>
    Eigen::Matrix4d amp_loss; // sqrt(kappa2) <i~|a^dag|j~>
    Eigen::Matrix4d amp_qb;   // sqrt(gamma) <i~|sigma_eg|j~>

    Eigen::Matrix4d kappa_wg() const { return amp_wg.cwiseAbs2(); }
    Eigen::Matrix4d kappa_loss() const { return amp_loss.cwiseAbs2(); }
    Eigen::Matrix4d gamma_qb() const { return amp_qb.cwiseAbs2(); }
};

RateTable decay_rates(const DressedBasis& basis, const DampingRates& damping);

struct LabelTracking {
    std::array<int, 4> perm{0, 1, 2, 3}; // prev label i continues as next label perm[i]
    bool ambiguous = false;
};

// Matches dressed labels between adjacent sweep points by maximal total overlap.
LabelTracking track_labels(const DressedBasis& prev, const DressedBasis& next);

// Relabels `next` so that its state i is the continuation of prev's state i.
DressedBasis apply_labels(const DressedBasis& next, const LabelTracking& tracking);

struct DressedPoint {
    DriveSpec drive;
    DressedBasis basis;
    RateTable rates;
};

DressedPoint dress(const DeviceModel& device, const DriveSpec& drive);

} // namespace imlambda
