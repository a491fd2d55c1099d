#pragma once

#include "imlambda/dressed.hpp"
#include "imlambda/execution.hpp"
#include "imlambda/system_model.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace imlambda {

using cplx = std::complex<double>;

template <typename T>
class Tensor4 {
public:
    T& operator()(int i, int j, int m, int n) { return data_[((i * 4 + j) * 4 + m) * 4 + n]; }
    const T& operator()(int i, int j, int m, int n) const { return data_[((i * 4 + j) * 4 + m) * 4 + n]; }

private:
    std::array<T, 256> data_{};
};

// Coefficients of the Heisenberg equation for the dressed transition operators
//   d sigma_ij/dt = sum_mn [ eta1_ijmn sigma_mn - i eta2_ijmn sigma_mn b_in + i eta2_jinm b_in^dag sigma_mn ]
// (plus the analogous qubit-bath input terms, whose expectation vanishes).
struct CoefficientTensors {
    Tensor4<cplx> eta1;    // s^-1
    Tensor4<double> eta2_wg; // s^-1/2
    Tensor4<double> eta2_qb; // s^-1/2
    std::array<int, 4> photon_number{};
    double kappa_scale = 0.0; // largest channel rate, used for relative tolerances
};

/// Builds the coefficient tensors from signed amplitudes. Products written as
/// sqrt(k~_ab k~_cd) are evaluated as amp(a,b)*amp(c,d) so interference terms keep
/// their relative signs. Waveguide, internal-loss and qubit channels all enter eta1.
CoefficientTensors build_coefficients(const DressedBasis& basis, const RateTable& rates);

/// Fourier harmonics s_ij^q of <sigma~_ij(t)> = sum_q s_ij^q exp(i q (w_p - w_d) t).
struct HarmonicState {
    int Q = 0;
    double detuning = 0.0; // w_p - w_d
    std::vector<cplx> s;   // (2Q+1) blocks of 16

    cplx operator()(int i, int j, int q) const {
        if (q < -Q || q > Q) return {0.0, 0.0};
        return s[static_cast<std::size_t>((q + Q) * 16 + i * 4 + j)];
    }
    cplx& at(int i, int j, int q) { return s[static_cast<std::size_t>((q + Q) * 16 + i * 4 + j)]; }

    // Largest violation of s_ij^q = conj(s_ji^-q).
    double hermiticity_error() const;
    // Largest violation of sum_m s_mm^q = delta_q0.
    double trace_error() const;
};

/// Solves the truncated harmonic system with |q| <= Q by dense LU. For each q the
/// (1,1) diagonal equation is replaced by sum_m s_mm^q = delta_q0.
/// Throws NumericalError if the relative residual exceeds 1e-6.
HarmonicState solve_harmonics(const CoefficientTensors& coeffs, const ProbeSpec& probe, const DriveSpec& drive,
                              int Q = 3);

/// r = 1 - i sum_mn amp_wg(m,n) s_nm^-1 / E_p.
cplx reflection(const HarmonicState& state, const RateTable& rates, const ProbeSpec& probe);

/// Full chain for one (drive, probe) point.
cplx reflection_at(const DeviceModel& device, const DriveSpec& drive, const ProbeSpec& probe, int Q = 3);

struct ReflectionGrid {
    std::vector<double> omega_p; // rad/s, monotone
    std::vector<double> P_d_dbm; // monotone
};

enum ReflectionFlag : std::uint8_t { kFlagOk = 0, kFlagSolverFailure = 1, kFlagLabelAmbiguous = 2 };

// Transition-frequency overlay curves (lab frame, rad/s) for one drive power.
struct TransitionCurves {
    double P_d_dbm = 0.0;
    double w41 = 0.0, w31 = 0.0, w42 = 0.0, w32 = 0.0, w21 = 0.0, w43 = 0.0;
    bool label_ambiguous = false;
};

struct ReflectionMap {
    ReflectionGrid grid;
    std::vector<cplx> r;            // index = ipd * n_omega + iw
    std::vector<std::uint8_t> flags; // same indexing
    std::vector<TransitionCurves> curves;

    std::size_t index(std::size_t ipd, std::size_t iw) const { return ipd * grid.omega_p.size() + iw; }
};

struct SweepOptions {
    int Q = 3;
    Execution execution = Execution::Parallel;
};

/// Reflection over the (omega_p, P_d) grid at fixed drive detuning and probe power.
/// Solver failures are flagged per point and do not abort the sweep.
ReflectionMap sweep_reflection(const DeviceModel& device, double delta_wd, const ReflectionGrid& grid,
                               double P_p_watts, const SweepOptions& options = {});

} // namespace imlambda
