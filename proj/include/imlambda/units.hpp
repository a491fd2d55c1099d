#pragma once

#include <cmath>
#include <numbers>

namespace imlambda {

inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kFluxQuantum = 2.067833848e-15; // Wb
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

constexpr double hz_to_angular(double hz) { return kTwoPi * hz; }
constexpr double angular_to_hz(double omega) { return omega / kTwoPi; }

// Photon flux |E|^2 (s^-1) of a classical field carrying `watts` at angular frequency `omega`.
inline double photon_flux(double watts, double omega) { return watts / (kHbar * omega); }

} // namespace imlambda
