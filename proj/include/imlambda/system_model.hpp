#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace imlambda {

// Ordered basis of the truncated qubit-resonator space.
enum BareState : int { kG0 = 0, kE0 = 1, kG1 = 2, kE1 = 3 };

// Photon number of each bare basis state.
inline constexpr int kPhotonNumber[4] = {0, 0, 1, 1};

/// Bare (undressed) qubit and resonator parameters, all in rad/s.
struct BareParams {
    double wbar_ge = 0.0;
    double wbar_gf = 0.0;
    double wbar_r = 0.0;
    double g_ge = 0.0;
    double g_ef = 0.0;
    double gamma_c = 0.0; ///< qubit coupling to the drive port

    double wbar_ef() const { return wbar_gf - wbar_ge; }

    /// Throws DomainError if a frequency is non-positive or a coupling negative.
    void validate() const;

    /// Human-readable warnings when the dispersive ratios exceed 0.25.
    std::vector<std::string> dispersive_warnings() const;
};

struct RenormalizedParams {
    double w_ge = 0.0;
    double w_r = 0.0;
    double chi = 0.0;
};

struct DampingRates {
    double kappa1 = 0.0; // waveguide
    double kappa2 = 0.0; // intrinsic resonator loss
    double gamma = 0.0;  // qubit energy decay

    double kappa() const { return kappa1 + kappa2; }
    void validate() const;
};

struct DriveSpec {
    double w_d = 0.0;
    double P_d = 0.0; // W

    double E_d() const;
    double detuning(const RenormalizedParams& ren) const { return w_d - ren.w_ge; }
};

struct ProbeSpec {
    double w_p = 0.0;
    double P_p = 0.0; // W

    // P_p = hbar w_p |E_p|^2, same photon-flux convention as the drive.
    double E_p() const;
};

RenormalizedParams renormalize(const BareParams& bare);

struct NestingMargins {
    double lower = 0.0; // w_d - (w_ge - 2 chi)
    double upper = 0.0; // w_ge - w_d
    bool nested() const { return lower > 0.0 && upper > 0.0; }
};

NestingMargins nesting_margin(const RenormalizedParams& ren, double w_d);

/// Rotating-frame Hamiltonian (rad/s) of the lowest four levels in the ordered
/// basis (|g,0>, |e,0>, |g,1>, |e,1>). Real symmetric because E_d is taken real.
Eigen::Matrix4d rotating_hamiltonian(const RenormalizedParams& ren, const DriveSpec& drive, double gamma_c);

/// Device description shared by the theory modules.
struct DeviceModel {
    BareParams bare;
    DampingRates damping;
    RenormalizedParams ren;

    static DeviceModel make(const BareParams& bare, const DampingRates& damping);

    // Drive at the given detuning from the renormalized qubit frequency.
    DriveSpec drive(double delta_wd, double P_d_watts) const { return {ren.w_ge + delta_wd, P_d_watts}; }
};

/// Device parameters of the reference flux-qubit sample.
BareParams reference_bare_params();
DampingRates reference_damping();
DeviceModel reference_device();

} // namespace imlambda
