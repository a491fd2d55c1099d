#pragma once

#include "imlambda/calibration.hpp"
#include "imlambda/matching.hpp"
#include "imlambda/spectrum.hpp"
#include "imlambda/system_model.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace imlambda {

struct SweepAxis {
    double start = 0.0;
    double stop = 0.0;
    int points = 1;
    std::vector<double> values() const;
};

struct DressedConfig {
    SweepAxis P_d_dbm{-100.0, -60.0, 401};
};

struct ReflectConfig {
    SweepAxis f_hz{10.55e9, 10.75e9, 201};
    SweepAxis P_d_dbm{-95.0, -70.0, 101};
    int Q = 3;
};

struct SpectrumConfig {
    SpectrumOptions options{};
    bool at_dip = true; // drive power and probe frequency from find_dip
    Branch branch = Branch::Upper4;
    int Q = 3;
};

struct MatchConfig {
    std::vector<Branch> branches{Branch::Upper4, Branch::Upper3};
    SweepAxis level_detuning_hz{-76e6, -48e6, 15};
    double level_P_p_dbm = -141.2;
    MatchOptions options{};
};

struct CalibrationConfig {
    NetworkModel model{};
    CalibGuess guess{};
    std::string data_path; // empty: synthetic round trip
    double synthetic_x = 0.998;
    double synthetic_noise_hz = 10e3;
    std::uint64_t synthetic_seed = 1;
    SweepAxis synthetic_P_exp_dbm{-140.0, -112.0, 29};
    BackboneOptions backbone{};
};

struct JpaConfig {
    std::string trace_path; // empty: synthetic round trip
    double pump_hz = 2.0 * 10.6145e9;
    double rbw_hz = 10e3;
    double Gs_db = 21.0;
    double Gi_db = 21.0;
    double signal_hz = 10.6157e9;
    double linewidth_hz = 1.210e6;
    double P_s_w = 1.77e-18;
    double noise_rel = 0.01;
    std::uint64_t seed = 1;
    SweepAxis f_hz{10.600e9, 10.629e9, 2901};
    double P_p_w = 2.3988329190194903e-18; // 10^-17.62 W
    double probe_hz = 10.681e9;
    double gain_uncertainty_db = 0.5;
};

struct RunConfig {
    BareParams bare{};
    DampingRates damping{};
    double delta_wd = 0.0; // rad/s
    double P_d_dbm = -84.0;
    double w_p = 0.0;      // rad/s
    double P_p_dbm = -146.2;

    DressedConfig dressed;
    ReflectConfig reflect;
    SpectrumConfig spectrum;
    MatchConfig match;
    CalibrationConfig calibration;
    JpaConfig jpa;

    // Every known key with its resolved value, in schema order, for output headers.
    std::vector<std::pair<std::string, std::string>> resolved;

    DeviceModel device() const { return DeviceModel::make(bare, damping); }
};

/// INI-like text: [section] headers, key = value, '#' or ';' comments. Dimensioned
/// values accept a unit suffix (Hz kHz MHz GHz, dBm W mW uW nW pW fW, m mm um, F pF fF,
/// A mA uA nA, ohm, s ms us ns); a bare number is taken in Hz, dBm, m, F, A, ohm or s.
/// Throws ConfigError with the key and line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Documented schema: one "section.key  unit  default  description" line per key.
std::string config_schema();

} // namespace imlambda
