#include "imlambda/system_model.hpp"

#include "imlambda/errors.hpp"
#include "imlambda/units.hpp"

#include <cmath>
#include <sstream>

namespace imlambda {

void BareParams::validate() const {
    if (!(wbar_ge > 0.0) || !(wbar_gf > 0.0) || !(wbar_r > 0.0))
        throw DomainError("bare frequencies must be strictly positive");
    if (!(g_ge >= 0.0) || !(g_ef >= 0.0) || !(gamma_c >= 0.0))
        throw DomainError("couplings must be nonnegative");
    if (!(wbar_gf > wbar_ge)) throw DomainError("wbar_gf must exceed wbar_ge");
}

std::vector<std::string> BareParams::dispersive_warnings() const {
    std::vector<std::string> out;
    const double r1 = g_ge / std::abs(wbar_r - wbar_ge);
    const double r2 = g_ef / std::abs(wbar_ef() - wbar_r);
    if (r1 >= 0.25) {
        std::ostringstream s;
        s << "g_ge/|wbar_r - wbar_ge| = " << r1 << " is outside the dispersive regime";
        out.push_back(s.str());
    }
    if (r2 >= 0.25) {
        std::ostringstream s;
        s << "g_ef/|wbar_ef - wbar_r| = " << r2 << " is outside the dispersive regime";
        out.push_back(s.str());
    }
    return out;
}

void DampingRates::validate() const {
    if (!(kappa1 >= 0.0) || !(kappa2 >= 0.0) || !(gamma >= 0.0))
        throw DomainError("damping rates must be nonnegative");
}

double DriveSpec::E_d() const {
    if (P_d < 0.0 || !(w_d > 0.0)) throw DomainError("drive needs P_d >= 0 and w_d > 0");
    return std::sqrt(photon_flux(P_d, w_d));
}

double ProbeSpec::E_p() const {
    if (P_p < 0.0 || !(w_p > 0.0)) throw DomainError("probe needs P_p >= 0 and w_p > 0");
    return std::sqrt(photon_flux(P_p, w_p));
}

RenormalizedParams renormalize(const BareParams& bare) {
    const double d_ge = bare.wbar_r - bare.wbar_ge;
    const double d_ef = bare.wbar_ef() - bare.wbar_r;
    if (d_ge == 0.0 || d_ef == 0.0) throw DomainError("degenerate qubit-resonator detuning");
    const double shift = bare.g_ge * bare.g_ge / d_ge;
    RenormalizedParams ren;
    ren.w_ge = bare.wbar_ge - shift;
    ren.w_r = bare.wbar_r + shift;
    ren.chi = shift + bare.g_ef * bare.g_ef / (2.0 * d_ef);
    return ren;
}

NestingMargins nesting_margin(const RenormalizedParams& ren, double w_d) {
    return {w_d - (ren.w_ge - 2.0 * ren.chi), ren.w_ge - w_d};
}

Eigen::Matrix4d rotating_hamiltonian(const RenormalizedParams& ren, const DriveSpec& drive, double gamma_c) {
    const double wd = drive.w_d;
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    for (int n = 0; n <= 1; ++n) {
        h(kG0 + 2 * n, kG0 + 2 * n) = n * (ren.w_r - wd);
        h(kE0 + 2 * n, kE0 + 2 * n) = ren.w_ge - wd + n * (ren.w_r - wd - 2.0 * ren.chi);
    }
    const double rabi = std::sqrt(gamma_c) * drive.E_d();
    h(kG0, kE0) = h(kE0, kG0) = rabi;
    h(kG1, kE1) = h(kE1, kG1) = rabi;
    return h;
}

DeviceModel DeviceModel::make(const BareParams& bare, const DampingRates& damping) {
    bare.validate();
    damping.validate();
    return {bare, damping, renormalize(bare)};
}

BareParams reference_bare_params() {
    BareParams b;
    b.wbar_ge = hz_to_angular(5.468e9);
    b.wbar_gf = hz_to_angular(19.362e9);
    b.wbar_r = hz_to_angular(10.671e9);
    b.g_ge = hz_to_angular(0.197e9);
    b.g_ef = hz_to_angular(0.458e9);
    b.gamma_c = hz_to_angular(0.6e3);
    return b;
}

DampingRates reference_damping() {
    const double kappa = hz_to_angular(16.4e6);
    return {0.95 * kappa, 0.05 * kappa, hz_to_angular(0.227e6)};
}

DeviceModel reference_device() { return DeviceModel::make(reference_bare_params(), reference_damping()); }

} // namespace imlambda
