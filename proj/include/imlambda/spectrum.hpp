#pragma once

#include "imlambda/dressed.hpp"
#include "imlambda/execution.hpp"
#include "imlambda/steady_state.hpp"

#include <utility>
#include <vector>

namespace imlambda {

enum class SpectrumMethod {
    Resolvent,  // exact Laplace transform in the frame co-rotating with each excitation block
    TimeDomain, // adaptive integration over tau with stationary-time averaging
};

struct SpectrumOptions {
    SpectrumMethod method = SpectrumMethod::Resolvent;
    int n_t = 16;         // stationary-time samples per probe period (time domain only)
    double tau_max = 0.0; // s; 0 selects 10 / min(gamma~21, kappa), doubled until decayed
    double rtol = 1e-8;
    int samples_per_period = 64; // tau sampling for the Fourier quadrature
    Execution execution = Execution::Parallel;
};

// Weighted connected correlator V(tau) = sum A[u][v] A[j][i] <sigma_uv(t), sigma_ij(t+tau)>,
// averaged over stationary times t, in the frame rotating at w_d.
struct CorrelatorSet {
    std::vector<double> tau;
    std::vector<cplx> c;
    int t_phases = 0;
    double initial_norm = 0.0;
    double final_norm = 0.0;
};

struct SpectrumTrace {
    std::vector<double> omega;        // lab frame, rad/s
    std::vector<double> S;            // W / (rad/s)
    std::vector<double> flux_density; // photons s^-1 / (rad/s)
    double tau_max = 0.0;             // s; infinite for the resolvent method
    int n_t = 0;
    int Q = 0;
};

/// Excitation-frame generator: with y_ij = <sigma_ij> exp(-i phi_ij (w_p - w_d) t),
/// phi_ij = n_i - n_j, the drive + probe dynamics are dy/dt = M y with M constant.
Eigen::Matrix<cplx, 16, 16> excitation_frame_generator(const CoefficientTensors& coeffs, double E_p, double detuning);

CorrelatorSet regression_correlators(const HarmonicState& state, const RateTable& rates, const CoefficientTensors& coeffs,
                                     const ProbeSpec& probe, const SpectrumOptions& options = {});

SpectrumTrace regression_spectrum(const HarmonicState& state, const RateTable& rates, const CoefficientTensors& coeffs,
                                  const ProbeSpec& probe, const DriveSpec& drive, const std::vector<double>& omega,
                                  const SpectrumOptions& options = {});

/// Lab-frame w~42 +- 2 pi 40 MHz at 2 pi 50 kHz spacing.
std::vector<double> default_spectrum_grid(const DressedBasis& basis, const DriveSpec& drive);

/// Lab-frame w~42 +- 2 pi 30 MHz.
std::pair<double, double> default_efficiency_window(const DressedBasis& basis, const DriveSpec& drive);

/// Trapezoidal photon-flux integral over the window divided by |E_p|^2.
double conversion_efficiency(const SpectrumTrace& trace, const ProbeSpec& probe, std::pair<double, double> window);

struct PeakInfo {
    double omega = 0.0; // rad/s, parabolic refinement of the grid maximum
    double value = 0.0;
    double fwhm = 0.0; // rad/s, linear interpolation of the half-maximum crossings
};

PeakInfo principal_peak(const SpectrumTrace& trace);

struct SpectrumReport {
    DressedPoint point;
    SpectrumTrace trace;
    double eta = 0.0;
    std::pair<double, double> window;
};

/// Steady state, spectrum on the default grid and efficiency for one operating point.
SpectrumReport spectrum_at(const DeviceModel& device, const DriveSpec& drive, const ProbeSpec& probe,
                           const SpectrumOptions& options = {}, int Q = 3);

} // namespace imlambda
