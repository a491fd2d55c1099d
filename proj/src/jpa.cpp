#include "imlambda/jpa.hpp"

#include "imlambda/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace imlambda {

Gain::Gain(std::vector<double> omega, std::vector<double> linear) : omega_(std::move(omega)), linear_(std::move(linear)) {
    if (omega_.size() < 2 || omega_.size() != linear_.size()) throw DomainError("gain table needs >= 2 matching rows");
    for (std::size_t k = 1; k < omega_.size(); ++k)
        if (!(omega_[k] > omega_[k - 1])) throw DomainError("gain table frequencies must be increasing");
    for (double g : linear_)
        if (!(g >= 1.0)) throw DomainError("gain must be >= 1 within the band");
}

Gain Gain::from_db(double db) { return Gain(std::pow(10.0, db / 10.0)); }

double Gain::operator()(double omega) const {
    if (omega_.empty()) return constant_;
    if (omega < omega_.front() || omega > omega_.back()) throw DomainError("frequency outside the gain tabulation");
    const auto it = std::upper_bound(omega_.begin(), omega_.end(), omega);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - omega_.begin()), omega_.size() - 1);
    const double t = (omega - omega_[k - 1]) / (omega_[k] - omega_[k - 1]);
    return linear_[k - 1] + t * (linear_[k] - linear_[k - 1]);
}

void JpaModel::validate() const {
    if (!(B > 0.0)) throw DomainError("resolution bandwidth must be positive");
    if (!(omega_a > 0.0)) throw DomainError("JPA pump frequency must be positive");
}

double LorentzianSignal::power() const { return S0 * std::numbers::pi * delta_omega / 2.0; }

void LorentzianSignal::validate() const {
    if (!(delta_omega > 0.0)) throw DomainError("Lorentzian width must be positive");
    if (!(S0 >= 0.0)) throw DomainError("Lorentzian peak density must be nonnegative");
}

std::vector<double> jpa_output(const JpaModel& model, const LorentzianSignal& sig, const std::vector<double>& omega) {
    model.validate();
    sig.validate();
    std::vector<double> out(omega.size());
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const double w = omega[k];
        const double wi = model.omega_a - w;
        out[k] = (model.G_s(w) * sig(w) + model.G_i(wi) * sig(wi)) * model.B;
    }
    return out;
}

JpaFit fit_jpa_spectrum(const JpaTrace& measured, const JpaModel& model, const LorentzianSignal& guess,
                        const LeastSquaresOptions& options) {
    model.validate();
    guess.validate();
    if (measured.omega.size() != measured.P_out.size() || measured.omega.size() < 4)
        throw DomainError("JPA trace needs at least 4 matching rows");
    const double scale = *std::max_element(measured.P_out.begin(), measured.P_out.end());
    if (!(scale > 0.0)) throw DomainError("JPA trace has no positive power");
    if (!(guess.S0 > 0.0)) throw DomainError("Lorentzian guess needs a positive peak density");

    // Internal parameters relative to the guess: centre offset in guessed widths (plus 1), width, peak density.
    const double w0 = guess.omega_s, dw0 = guess.delta_omega, s0 = guess.S0;
    auto unpack = [&](const Eigen::VectorXd& p) {
        return LorentzianSignal{w0 + (p(0) - 1.0) * dw0, p(1) * dw0, p(2) * s0};
    };
    const Eigen::Index n = static_cast<Eigen::Index>(measured.omega.size());
    auto residual = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
        Eigen::VectorXd r(n);
        const LorentzianSignal s = unpack(p);
        if (!(s.delta_omega > 0.0) || !(s.S0 >= 0.0)) {
            r.setConstant(std::numeric_limits<double>::quiet_NaN());
            return r;
        }
        const std::vector<double> m = jpa_output(model, s, measured.omega);
        for (Eigen::Index k = 0; k < n; ++k)
            r(k) = (m[static_cast<std::size_t>(k)] - measured.P_out[static_cast<std::size_t>(k)]) / scale;
        return r;
    };
    Eigen::VectorXd p0(3);
    p0 << 1.0, 1.0, 1.0;
    const LeastSquaresResult res = levenberg_marquardt(residual, p0, options);
    JpaFit fit;
    fit.signal = unpack(res.params);
    fit.residual = std::sqrt(res.residuals.squaredNorm() / static_cast<double>(n));
    fit.iterations = res.iterations;
    fit.cost_history = res.cost_history;
    return fit;
}

std::size_t assign_signal_peak(const JpaTrace& trace, const JpaModel& model, double predicted) {
    const auto& w = trace.omega;
    const auto& p = trace.P_out;
    bool found = false;
    std::size_t best = 0;
    for (std::size_t k = 1; k + 1 < w.size(); ++k) {
        if (!(p[k] >= p[k - 1] && p[k] > p[k + 1]) || !(w[k] > 0.5 * model.omega_a)) continue;
        if (!found) {
            best = k;
            found = true;
            continue;
        }
        const double dk = std::abs(w[k] - predicted), db = std::abs(w[best] - predicted);
        if (dk < db || (dk == db && p[k] > p[best])) best = k;
    }
    if (!found) throw DomainError("no signal peak above the JPA band centre");
    return best;
}

LorentzianSignal guess_signal(const JpaTrace& trace, const JpaModel& model, std::size_t peak) {
    const auto& w = trace.omega;
    const auto& p = trace.P_out;
    const double half = 0.5 * p[peak];
    std::size_t l = peak, r = peak;
    while (l > 0 && p[l] > half) --l;
    while (r + 1 < w.size() && p[r] > half) ++r;
    LorentzianSignal s;
    s.omega_s = w[peak];
    s.delta_omega = std::max(w[r] - w[l], w.size() > 1 ? std::abs(w[1] - w[0]) : 1.0);
    s.S0 = p[peak] / (model.G_s(w[peak]) * model.B);
    return s;
}

MeasuredEfficiency measured_efficiency(double P_s, double P_p, double omega_p, double omega_s,
                                       double gain_uncertainty_db) {
    if (!(P_s > 0.0) || !(P_p > 0.0) || !(omega_p > 0.0) || !(omega_s > 0.0))
        throw DomainError("efficiency inputs must be positive");
    MeasuredEfficiency e;
    e.eta = (P_s / P_p) * (omega_p / omega_s);
    const double f = std::pow(10.0, gain_uncertainty_db / 10.0);
    e.lower = e.eta / f;
    e.upper = e.eta * f;
    return e;
}

} // namespace imlambda
