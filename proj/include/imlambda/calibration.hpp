#pragma once

#include "imlambda/execution.hpp"
#include "imlambda/least_squares.hpp"
#include "imlambda/units.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace imlambda {

using Abcd = Eigen::Matrix2cd;

// Lossless model of the CPW resonator: input capacitor, two CPW sections with the
// junction between them, output capacitor. SI units throughout.
struct NetworkModel {
    double Z0 = 50.0;
    double Z_cpw = 52.1;
    double l = 2.15e-3;
    double v_p = 1.16875423e8;
    double C_in = 15e-15;
    double C_c = 4e-15;
    double C_J = 8.5e-15;
    double I0 = 0.689e-6;

    double L_J0() const { return kFluxQuantum / (kTwoPi * I0); }
    void validate() const;
};

inline constexpr double kBesselJ1FirstZero = 3.8317059702075125;

/// L_J = Delta / (2 J1(Delta)) L_J0; equals L_J0 at Delta = 0.
double josephson_inductance(double delta, double L_J0);

Abcd series_impedance(std::complex<double> z);
Abcd transmission_line(double Z_c, double beta_l);

/// T_Cin T_CPW T_JJ T_CPW T_Cc.
Abcd abcd_chain(const NetworkModel& model, double omega, double delta);

struct DrivePower {
    std::complex<double> I2;   // A, port-2 short-circuit current
    std::complex<double> I_RF; // A
    double P_p_dbm = 0.0;
};

/// Port 2 shorted; I2 scaled so the junction carries 2 J1(Delta) I0.
DrivePower drive_and_power(const NetworkModel& model, double omega, double delta);

/// Reflection at port 1 with port 2 shorted: (B - Z0 D) / (B + Z0 D).
std::complex<double> s11(const NetworkModel& model, double omega, double delta);

/// (A + B/Z0 - C Z0 - D) / (A + B/Z0 + C Z0 + D), port 2 terminated in Z0.
std::complex<double> s11_two_port(const NetworkModel& model, double omega, double delta);

/// Centered-difference phase slope d arg S11 / d omega (s).
double phase_slope(const NetworkModel& model, double omega, double delta, double h);

struct ResonanceOptions {
    double omega_lo = kTwoPi * 10.0e9;
    double omega_hi = kTwoPi * 11.0e9;
    double grid_step = kTwoPi * 10e6;
    double stencil = kTwoPi * 50e3;
    double tol = kTwoPi * 1e-3;
};

/// Frequency of maximum |d arg S11 / d omega| in the window.
double resonance_frequency(const NetworkModel& model, double delta, const ResonanceOptions& options = {});

struct BackbonePoint {
    double delta = 0.0;
    double omega_r = 0.0;
    double P_p_dbm = 0.0;
};

struct BackboneOptions {
    double delta_min = 1e-4;
    double delta_max = 2.0;
    int n_delta = 200;
    // Window for the linear resonance, then the per-phase window relative to it.
    double linear_lo = kTwoPi * 5.0e9;
    double linear_hi = kTwoPi * 16.0e9;
    double below = kTwoPi * 3.0e9;
    double above = kTwoPi * 0.1e9;
    ResonanceOptions resonance{};
    Execution execution = Execution::Parallel;
};

struct Backbone {
    std::vector<BackbonePoint> points;
    double omega_linear = 0.0;
    bool folded = false; // P_p(Delta) or omega_r(Delta) not strictly monotone
};

Backbone backbone(const NetworkModel& model, const BackboneOptions& options = {});

struct CalibDataset {
    std::vector<double> P_exp_dbm;
    std::vector<double> omega_r; // rad/s
    void validate() const;
};

struct CalibGuess {
    double x = 1.0;
    double I0 = 0.7e-6;
    double Z_cpw = 50.0;
};

struct CalibFit {
    double x = 0.0;
    double I0 = 0.0;
    double Z_cpw = 0.0;
    double residual = 0.0; // rms of omega_model - omega_meas, rad/s
    int iterations = 0;
    std::vector<double> cost_history;
};

struct CalibOptions {
    LeastSquaresOptions lsq{};
    BackboneOptions backbone{};
};

/// Resonance predicted at x * P_exp by PCHIP interpolation of the backbone.
/// Powers past the fold throw unless `beyond` is given; then the last segment is
/// extended linearly and the number of such points is stored there.
std::vector<double> model_resonances(const NetworkModel& model, double x, const std::vector<double>& P_exp_dbm,
                                     const BackboneOptions& options = {}, int* beyond = nullptr);

CalibFit fit_calibration(const CalibDataset& data, const NetworkModel& model0, const CalibGuess& guess,
                         const CalibOptions& options = {});

/// Resonances of `truth` at x * P_exp plus Gaussian noise of the given rms (Hz).
CalibDataset synthetic_calibration(const NetworkModel& truth, double x, const std::vector<double>& P_exp_dbm,
                                   double noise_hz, std::uint64_t seed, const BackboneOptions& options = {});

} // namespace imlambda
