#pragma once

#include "imlambda/least_squares.hpp"

#include <vector>

namespace imlambda {

// Power gain (linear), either constant or tabulated against angular frequency.
class Gain {
public:
    Gain() = default;
    explicit Gain(double constant) : constant_(constant) {}
    Gain(std::vector<double> omega, std::vector<double> linear);

    static Gain from_db(double db);

    double operator()(double omega) const; // DomainError outside a tabulation
    bool tabulated() const { return !omega_.empty(); }

private:
    double constant_ = 1.0;
    std::vector<double> omega_, linear_;
};

struct JpaModel {
    double omega_a = 0.0; // pump frequency, rad/s
    double B = 0.0;       // resolution bandwidth, rad/s
    Gain G_s{1.0};
    Gain G_i{1.0};
    void validate() const;
};

struct LorentzianSignal {
    double omega_s = 0.0;     // rad/s
    double delta_omega = 0.0; // FWHM, rad/s
    double S0 = 0.0;          // peak density, W/(rad/s)

    double operator()(double omega) const {
        const double u = 2.0 * (omega - omega_s) / delta_omega;
        return S0 / (1.0 + u * u);
    }
    // Integrated power S0 pi delta_omega / 2 (W).
    double power() const;
    void validate() const;
};

/// P_out(w) = [G_s(w) S_in(w) + G_i(w_a - w) S_in(w_a - w)] B.
std::vector<double> jpa_output(const JpaModel& model, const LorentzianSignal& sig, const std::vector<double>& omega);

struct JpaTrace {
    std::vector<double> omega; // rad/s
    std::vector<double> P_out; // W
};

struct JpaFit {
    LorentzianSignal signal;
    double residual = 0.0; // rms of (model - data) / max(data)
    int iterations = 0;
    std::vector<double> cost_history;
};

JpaFit fit_jpa_spectrum(const JpaTrace& measured, const JpaModel& model, const LorentzianSignal& guess,
                        const LeastSquaresOptions& options = {});

/// Local maximum above w_a / 2 nearest to `predicted`; ties go to the larger peak.
/// Returns an index into trace.omega.
std::size_t assign_signal_peak(const JpaTrace& trace, const JpaModel& model, double predicted);

/// Starting point from the assigned peak: centre, half-maximum width, and height / (G_s B).
LorentzianSignal guess_signal(const JpaTrace& trace, const JpaModel& model, std::size_t peak);

struct MeasuredEfficiency {
    double eta = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// eta = (P_s / P_p)(w_p / w_s); bounds from a symmetric gain uncertainty in dB.
MeasuredEfficiency measured_efficiency(double P_s, double P_p, double omega_p, double omega_s,
                                       double gain_uncertainty_db = 0.5);

} // namespace imlambda
