#include "imlambda/config.hpp"

#include "imlambda/csv.hpp"
#include "imlambda/errors.hpp"
#include "imlambda/units.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace imlambda {

std::vector<double> SweepAxis::values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k)
        v[static_cast<std::size_t>(k)] = points == 1 ? start : start + (stop - start) * k / (points - 1);
    return v;
}

namespace {

enum class Kind { Frequency, PowerDbm, PowerW, Length, Capacitance, Current, Impedance, Time, Number, Integer, Text };

struct Value {
    double number = 0.0;
    std::string text;
};

struct Key {
    const char* section;
    const char* name;
    Kind kind;
    bool required;
    const char* fallback; // default, in the config syntax
    const char* help;
    std::function<void(RunConfig&, const Value&)> apply;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unit_name(Kind k) {
    switch (k) {
    case Kind::Frequency: return "Hz";
    case Kind::PowerDbm: return "dBm";
    case Kind::PowerW: return "W";
    case Kind::Length: return "m";
    case Kind::Capacitance: return "F";
    case Kind::Current: return "A";
    case Kind::Impedance: return "ohm";
    case Kind::Time: return "s";
    case Kind::Number: return "-";
    case Kind::Integer: return "int";
    case Kind::Text: return "text";
    }
    return "";
}

Value parse_value(const Key& key, std::string raw, int line) {
    const std::string where = std::string(key.section) + "." + key.name;
    // Accept the Unicode minus sign and surrounding quotes.
    for (std::size_t pos; (pos = raw.find("\xE2\x88\x92")) != std::string::npos;) raw.replace(pos, 3, "-");
    raw = trim(raw);
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') raw = trim(raw.substr(1, raw.size() - 2));
    if (raw.empty()) throw ConfigError("empty value", where, line);

    Value v;
    if (key.kind == Kind::Text) {
        v.text = raw;
        return v;
    }
    const char* begin = raw.data();
    const char* end = raw.data() + raw.size();
    const char* num_begin = begin[0] == '+' ? begin + 1 : begin;
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(num_begin, end, x);
    if (ec != std::errc()) throw ConfigError("expected a number, got '" + raw + "'", where, line);
    const std::string unit = trim(std::string(ptr, end));
    if (!std::isfinite(x)) throw ConfigError("value must be finite", where, line);

    auto bad_unit = [&]() {
        return ConfigError("unit '" + unit + "' not allowed; expected " + unit_name(key.kind) + "-compatible", where,
                           line);
    };
    static const std::map<std::string, double> freq{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    static const std::map<std::string, double> watts{{"W", 1.0},    {"mW", 1e-3},  {"uW", 1e-6},
                                                     {"nW", 1e-9},  {"pW", 1e-12}, {"fW", 1e-15},
                                                     {"aW", 1e-18}, {"zW", 1e-21}};
    static const std::map<std::string, double> length{{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}};
    static const std::map<std::string, double> cap{{"F", 1.0}, {"pF", 1e-12}, {"fF", 1e-15}};
    static const std::map<std::string, double> cur{{"A", 1.0}, {"mA", 1e-3}, {"uA", 1e-6}, {"nA", 1e-9}};
    static const std::map<std::string, double> res{{"ohm", 1.0}, {"Ohm", 1.0}};
    static const std::map<std::string, double> time{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
    auto scaled = [&](const std::map<std::string, double>& table) {
        if (unit.empty()) return x;
        const auto it = table.find(unit);
        if (it == table.end()) throw bad_unit();
        return x * it->second;
    };

    switch (key.kind) {
    case Kind::Frequency: v.number = scaled(freq); break;
    case Kind::Length: v.number = scaled(length); break;
    case Kind::Capacitance: v.number = scaled(cap); break;
    case Kind::Current: v.number = scaled(cur); break;
    case Kind::Impedance: v.number = scaled(res); break;
    case Kind::Time: v.number = scaled(time); break;
    case Kind::PowerDbm:
        if (unit.empty() || unit == "dBm") v.number = x;
        else {
            const auto it = watts.find(unit);
            if (it == watts.end()) throw bad_unit();
            if (!(x > 0.0)) throw ConfigError("power in watts must be positive", where, line);
            v.number = watts_to_dbm(x * it->second);
        }
        break;
    case Kind::PowerW:
        if (unit == "dBm") v.number = dbm_to_watts(x);
        else {
            const auto it = watts.find(unit.empty() ? "W" : unit);
            if (it == watts.end()) throw bad_unit();
            v.number = x * it->second;
        }
        break;
    case Kind::Number:
        if (!unit.empty()) throw bad_unit();
        v.number = x;
        break;
    case Kind::Integer:
        if (!unit.empty() || x != std::floor(x)) throw ConfigError("expected an integer", where, line);
        v.number = x;
        break;
    case Kind::Text: break;
    }
    return v;
}

int as_int(const Value& v) { return static_cast<int>(v.number); }

Branch parse_branch(const std::string& s) {
    if (s == "4") return Branch::Upper4;
    if (s == "3") return Branch::Upper3;
    throw DomainError("branch must be 3 or 4");
}

const std::vector<Key>& schema() {
    static const std::vector<Key> keys = {
        {"device", "wbar_ge", Kind::Frequency, true, nullptr, "bare qubit g-e frequency",
         [](RunConfig& c, const Value& v) { c.bare.wbar_ge = hz_to_angular(v.number); }},
        {"device", "wbar_gf", Kind::Frequency, true, nullptr, "bare qubit g-f frequency",
         [](RunConfig& c, const Value& v) { c.bare.wbar_gf = hz_to_angular(v.number); }},
        {"device", "wbar_r", Kind::Frequency, true, nullptr, "bare resonator frequency",
         [](RunConfig& c, const Value& v) { c.bare.wbar_r = hz_to_angular(v.number); }},
        {"device", "g_ge", Kind::Frequency, true, nullptr, "g-e coupling",
         [](RunConfig& c, const Value& v) { c.bare.g_ge = hz_to_angular(v.number); }},
        {"device", "g_ef", Kind::Frequency, true, nullptr, "e-f coupling",
         [](RunConfig& c, const Value& v) { c.bare.g_ef = hz_to_angular(v.number); }},
        {"device", "gamma_c", Kind::Frequency, true, nullptr, "qubit coupling to the drive port",
         [](RunConfig& c, const Value& v) { c.bare.gamma_c = hz_to_angular(v.number); }},
        {"damping", "kappa", Kind::Frequency, true, nullptr, "total resonator decay rate",
         [](RunConfig& c, const Value& v) { c.damping.kappa1 = hz_to_angular(v.number); }},
        {"damping", "kappa1_fraction", Kind::Number, false, "0.95", "waveguide share of kappa",
         [](RunConfig& c, const Value& v) {
             if (!(v.number >= 0.0 && v.number <= 1.0)) throw DomainError("fraction must lie in [0, 1]");
             c.damping.kappa2 = v.number; // combined after parsing
         }},
        {"damping", "gamma", Kind::Frequency, true, nullptr, "qubit energy decay rate",
         [](RunConfig& c, const Value& v) { c.damping.gamma = hz_to_angular(v.number); }},
        {"drive", "detuning", Kind::Frequency, true, nullptr, "drive detuning from the renormalized qubit",
         [](RunConfig& c, const Value& v) { c.delta_wd = hz_to_angular(v.number); }},
        {"drive", "power", Kind::PowerDbm, false, "-84 dBm", "drive power",
         [](RunConfig& c, const Value& v) { c.P_d_dbm = v.number; }},
        {"probe", "frequency", Kind::Frequency, false, "0 Hz", "probe frequency (0: lab-frame w~41)",
         [](RunConfig& c, const Value& v) { c.w_p = hz_to_angular(v.number); }},
        {"probe", "power", Kind::PowerDbm, false, "-146.2 dBm", "probe power",
         [](RunConfig& c, const Value& v) { c.P_p_dbm = v.number; }},

        {"dressed", "power_start", Kind::PowerDbm, false, "-100 dBm", "drive power sweep start",
         [](RunConfig& c, const Value& v) { c.dressed.P_d_dbm.start = v.number; }},
        {"dressed", "power_stop", Kind::PowerDbm, false, "-60 dBm", "drive power sweep stop",
         [](RunConfig& c, const Value& v) { c.dressed.P_d_dbm.stop = v.number; }},
        {"dressed", "power_points", Kind::Integer, false, "401", "drive power sweep points",
         [](RunConfig& c, const Value& v) { c.dressed.P_d_dbm.points = as_int(v); }},

        {"reflect", "f_start", Kind::Frequency, false, "10.55 GHz", "probe sweep start",
         [](RunConfig& c, const Value& v) { c.reflect.f_hz.start = v.number; }},
        {"reflect", "f_stop", Kind::Frequency, false, "10.75 GHz", "probe sweep stop",
         [](RunConfig& c, const Value& v) { c.reflect.f_hz.stop = v.number; }},
        {"reflect", "f_points", Kind::Integer, false, "201", "probe sweep points",
         [](RunConfig& c, const Value& v) { c.reflect.f_hz.points = as_int(v); }},
        {"reflect", "power_start", Kind::PowerDbm, false, "-95 dBm", "drive power sweep start",
         [](RunConfig& c, const Value& v) { c.reflect.P_d_dbm.start = v.number; }},
        {"reflect", "power_stop", Kind::PowerDbm, false, "-70 dBm", "drive power sweep stop",
         [](RunConfig& c, const Value& v) { c.reflect.P_d_dbm.stop = v.number; }},
        {"reflect", "power_points", Kind::Integer, false, "101", "drive power sweep points",
         [](RunConfig& c, const Value& v) { c.reflect.P_d_dbm.points = as_int(v); }},
        {"reflect", "harmonics", Kind::Integer, false, "3", "harmonic cutoff Q",
         [](RunConfig& c, const Value& v) { c.reflect.Q = as_int(v); }},

        {"spectrum", "method", Kind::Text, false, "resolvent", "resolvent | time-domain",
         [](RunConfig& c, const Value& v) {
             if (v.text == "resolvent") c.spectrum.options.method = SpectrumMethod::Resolvent;
             else if (v.text == "time-domain") c.spectrum.options.method = SpectrumMethod::TimeDomain;
             else throw DomainError("method must be resolvent or time-domain");
         }},
        {"spectrum", "stationary_samples", Kind::Integer, false, "16", "stationary-time samples N_t",
         [](RunConfig& c, const Value& v) { c.spectrum.options.n_t = as_int(v); }},
        {"spectrum", "tau_max", Kind::Time, false, "0 s", "correlator horizon (0: automatic)",
         [](RunConfig& c, const Value& v) { c.spectrum.options.tau_max = v.number; }},
        {"spectrum", "rtol", Kind::Number, false, "1e-8", "integrator relative tolerance",
         [](RunConfig& c, const Value& v) { c.spectrum.options.rtol = v.number; }},
        {"spectrum", "at_dip", Kind::Text, false, "true", "use the dip drive power and probe frequency",
         [](RunConfig& c, const Value& v) {
             if (v.text != "true" && v.text != "false") throw DomainError("expected true or false");
             c.spectrum.at_dip = v.text == "true";
         }},
        {"spectrum", "branch", Kind::Text, false, "4", "upper state for the dip search (3 or 4)",
         [](RunConfig& c, const Value& v) { c.spectrum.branch = parse_branch(v.text); }},
        {"spectrum", "harmonics", Kind::Integer, false, "3", "harmonic cutoff Q",
         [](RunConfig& c, const Value& v) { c.spectrum.Q = as_int(v); }},

        {"match", "branches", Kind::Text, false, "4,3", "comma-separated branches",
         [](RunConfig& c, const Value& v) {
             c.match.branches.clear();
             std::stringstream ss(v.text);
             for (std::string item; std::getline(ss, item, ',');) c.match.branches.push_back(parse_branch(trim(item)));
         }},
        {"match", "level_start", Kind::Frequency, false, "-76 MHz", "level-diagram detuning start",
         [](RunConfig& c, const Value& v) { c.match.level_detuning_hz.start = v.number; }},
        {"match", "level_stop", Kind::Frequency, false, "-48 MHz", "level-diagram detuning stop",
         [](RunConfig& c, const Value& v) { c.match.level_detuning_hz.stop = v.number; }},
        {"match", "level_points", Kind::Integer, false, "15", "level-diagram points (0 disables)",
         [](RunConfig& c, const Value& v) { c.match.level_detuning_hz.points = as_int(v); }},
        {"match", "level_probe_power", Kind::PowerDbm, false, "-141.2 dBm", "probe power for the level diagram",
         [](RunConfig& c, const Value& v) { c.match.level_P_p_dbm = v.number; }},
        {"match", "harmonics", Kind::Integer, false, "3", "harmonic cutoff Q",
         [](RunConfig& c, const Value& v) { c.match.options.Q = as_int(v); }},

        {"calibration", "Z0", Kind::Impedance, false, "50 ohm", "reference impedance",
         [](RunConfig& c, const Value& v) { c.calibration.model.Z0 = v.number; }},
        {"calibration", "Z_cpw", Kind::Impedance, false, "52.1 ohm", "CPW impedance",
         [](RunConfig& c, const Value& v) { c.calibration.model.Z_cpw = v.number; }},
        {"calibration", "length", Kind::Length, false, "2.15 mm", "length of each CPW section",
         [](RunConfig& c, const Value& v) { c.calibration.model.l = v.number; }},
        {"calibration", "v_p", Kind::Number, false, "1.16875423e8", "phase velocity (m/s)",
         [](RunConfig& c, const Value& v) { c.calibration.model.v_p = v.number; }},
        {"calibration", "C_in", Kind::Capacitance, false, "15 fF", "input coupling capacitance",
         [](RunConfig& c, const Value& v) { c.calibration.model.C_in = v.number; }},
        {"calibration", "C_c", Kind::Capacitance, false, "4 fF", "output coupling capacitance",
         [](RunConfig& c, const Value& v) { c.calibration.model.C_c = v.number; }},
        {"calibration", "C_J", Kind::Capacitance, false, "8.5 fF", "junction capacitance",
         [](RunConfig& c, const Value& v) { c.calibration.model.C_J = v.number; }},
        {"calibration", "I0", Kind::Current, false, "0.689 uA", "junction critical current",
         [](RunConfig& c, const Value& v) { c.calibration.model.I0 = v.number; }},
        {"calibration", "data", Kind::Text, false, "synthetic", "CSV (P_exp_dBm, f_r_Hz) or 'synthetic'",
         [](RunConfig& c, const Value& v) { c.calibration.data_path = v.text == "synthetic" ? "" : v.text; }},
        {"calibration", "guess_x", Kind::Number, false, "1.0", "initial power scale",
         [](RunConfig& c, const Value& v) { c.calibration.guess.x = v.number; }},
        {"calibration", "guess_I0", Kind::Current, false, "0.7 uA", "initial critical current",
         [](RunConfig& c, const Value& v) { c.calibration.guess.I0 = v.number; }},
        {"calibration", "guess_Z_cpw", Kind::Impedance, false, "50 ohm", "initial CPW impedance",
         [](RunConfig& c, const Value& v) { c.calibration.guess.Z_cpw = v.number; }},
        {"calibration", "synthetic_x", Kind::Number, false, "0.998", "power scale of the synthetic data",
         [](RunConfig& c, const Value& v) { c.calibration.synthetic_x = v.number; }},
        {"calibration", "synthetic_noise", Kind::Frequency, false, "10 kHz", "rms noise of the synthetic data",
         [](RunConfig& c, const Value& v) { c.calibration.synthetic_noise_hz = v.number; }},
        {"calibration", "synthetic_seed", Kind::Integer, false, "1", "noise seed",
         [](RunConfig& c, const Value& v) { c.calibration.synthetic_seed = static_cast<std::uint64_t>(v.number); }},
        {"calibration", "power_start", Kind::PowerDbm, false, "-140 dBm", "synthetic power start",
         [](RunConfig& c, const Value& v) { c.calibration.synthetic_P_exp_dbm.start = v.number; }},
        {"calibration", "power_stop", Kind::PowerDbm, false, "-112 dBm", "synthetic power stop",
         [](RunConfig& c, const Value& v) { c.calibration.synthetic_P_exp_dbm.stop = v.number; }},
        {"calibration", "power_points", Kind::Integer, false, "29", "synthetic power points",
         [](RunConfig& c, const Value& v) { c.calibration.synthetic_P_exp_dbm.points = as_int(v); }},
        {"calibration", "delta_max", Kind::Number, false, "2.0", "largest junction phase amplitude",
         [](RunConfig& c, const Value& v) { c.calibration.backbone.delta_max = v.number; }},
        {"calibration", "delta_points", Kind::Integer, false, "200", "backbone points",
         [](RunConfig& c, const Value& v) { c.calibration.backbone.n_delta = as_int(v); }},

        {"jpa", "trace", Kind::Text, false, "synthetic", "CSV (f_Hz, P_out_W) with metadata, or 'synthetic'",
         [](RunConfig& c, const Value& v) { c.jpa.trace_path = v.text == "synthetic" ? "" : v.text; }},
        {"jpa", "pump", Kind::Frequency, false, "21.229 GHz", "pump frequency (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.pump_hz = v.number; }},
        {"jpa", "rbw", Kind::Frequency, false, "10 kHz", "resolution bandwidth (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.rbw_hz = v.number; }},
        {"jpa", "gain_signal", Kind::Number, false, "21", "signal gain in dB (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.Gs_db = v.number; }},
        {"jpa", "gain_idler", Kind::Number, false, "21", "idler gain in dB (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.Gi_db = v.number; }},
        {"jpa", "signal", Kind::Frequency, false, "10.6157 GHz", "signal centre (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.signal_hz = v.number; }},
        {"jpa", "linewidth", Kind::Frequency, false, "1.21 MHz", "signal FWHM (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.linewidth_hz = v.number; }},
        {"jpa", "signal_power", Kind::PowerW, false, "1.77e-18 W", "integrated signal power (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.P_s_w = v.number; }},
        {"jpa", "noise", Kind::Number, false, "0.01", "relative multiplicative noise (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.noise_rel = v.number; }},
        {"jpa", "seed", Kind::Integer, false, "1", "noise seed",
         [](RunConfig& c, const Value& v) { c.jpa.seed = static_cast<std::uint64_t>(v.number); }},
        {"jpa", "f_start", Kind::Frequency, false, "10.600 GHz", "trace start (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.f_hz.start = v.number; }},
        {"jpa", "f_stop", Kind::Frequency, false, "10.629 GHz", "trace stop (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.f_hz.stop = v.number; }},
        {"jpa", "f_points", Kind::Integer, false, "2901", "trace points (synthetic trace)",
         [](RunConfig& c, const Value& v) { c.jpa.f_hz.points = as_int(v); }},
        {"jpa", "probe_power", Kind::PowerW, false, "-146.2 dBm", "probe power for the efficiency",
         [](RunConfig& c, const Value& v) { c.jpa.P_p_w = v.number; }},
        {"jpa", "probe_frequency", Kind::Frequency, false, "10.681 GHz", "probe frequency for the efficiency",
         [](RunConfig& c, const Value& v) { c.jpa.probe_hz = v.number; }},
        {"jpa", "gain_uncertainty", Kind::Number, false, "0.5", "total gain uncertainty in dB",
         [](RunConfig& c, const Value& v) { c.jpa.gain_uncertainty_db = v.number; }},
    };
    return keys;
}

std::string canonical(const Key& k, const Value& v) {
    if (k.kind == Kind::Text) return v.text;
    if (k.kind == Kind::Integer) return std::to_string(static_cast<long long>(v.number));
    return format_number(v.number) + (k.kind == Kind::Number ? "" : " " + unit_name(k.kind));
}

void require(bool ok, const std::string& what, const std::string& key) {
    if (!ok) throw ConfigError(what, key);
}

} // namespace

RunConfig parse_config(const std::string& text) {
    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, Entry> entries;
    std::set<std::string> sections;
    for (const Key& k : schema()) sections.insert(k.section);

    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = line;
        for (const char c : {'#', ';'}) {
            const auto pos = s.find(c);
            if (pos != std::string::npos) s = s.substr(0, pos);
        }
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("unterminated section header", "", lineno);
            section = trim(s.substr(1, s.size() - 2));
            if (!sections.count(section)) throw ConfigError("unknown section", section, lineno);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", "", lineno);
        const std::string name = trim(s.substr(0, eq));
        if (section.empty()) throw ConfigError("key outside any section", name, lineno);
        const std::string full = section + "." + name;
        bool known = false;
        for (const Key& k : schema()) known = known || (section == k.section && name == k.name);
        if (!known) throw ConfigError("unknown key", full, lineno);
        if (entries.count(full)) throw ConfigError("duplicate key", full, lineno);
        entries[full] = {s.substr(eq + 1), lineno};
    }

    std::vector<std::string> missing;
    for (const Key& k : schema())
        if (k.required && !entries.count(std::string(k.section) + "." + k.name))
            missing.push_back(std::string(k.section) + "." + k.name);
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw ConfigError("missing required keys: " + list);
    }

    RunConfig cfg;
    for (const Key& k : schema()) {
        const std::string full = std::string(k.section) + "." + k.name;
        const auto it = entries.find(full);
        const std::string raw = it != entries.end() ? it->second.value : std::string(k.fallback);
        const int at = it != entries.end() ? it->second.line : 0;
        const Value v = parse_value(k, raw, at);
        try {
            k.apply(cfg, v);
        } catch (const DomainError& e) {
            throw ConfigError(e.what(), full, at);
        }
        cfg.resolved.emplace_back(full, canonical(k, v));
    }

    // kappa holds the total and kappa2 the waveguide fraction until here.
    const double kappa = cfg.damping.kappa1, fraction = cfg.damping.kappa2;
    cfg.damping.kappa1 = fraction * kappa;
    cfg.damping.kappa2 = (1.0 - fraction) * kappa;

    try {
        cfg.bare.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), "device");
    }
    try {
        cfg.damping.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), "damping");
    }
    try {
        (void)renormalize(cfg.bare);
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), "device");
    }
    try {
        cfg.calibration.model.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), "calibration");
    }
    require(cfg.dressed.P_d_dbm.points >= 1, "need at least one point", "dressed.power_points");
    require(cfg.reflect.f_hz.points >= 1, "need at least one point", "reflect.f_points");
    require(cfg.reflect.P_d_dbm.points >= 1, "need at least one point", "reflect.power_points");
    require(cfg.reflect.Q >= 1, "harmonic cutoff must be >= 1", "reflect.harmonics");
    require(cfg.spectrum.Q >= 1, "harmonic cutoff must be >= 1", "spectrum.harmonics");
    require(cfg.match.options.Q >= 1, "harmonic cutoff must be >= 1", "match.harmonics");
    require(cfg.spectrum.options.n_t >= 1, "need at least one stationary sample", "spectrum.stationary_samples");
    require(cfg.spectrum.options.rtol > 0.0, "tolerance must be positive", "spectrum.rtol");
    require(cfg.spectrum.options.tau_max >= 0.0, "horizon must be nonnegative", "spectrum.tau_max");
    require(!cfg.match.branches.empty(), "need at least one branch", "match.branches");
    require(cfg.match.level_detuning_hz.points >= 0, "points must be nonnegative", "match.level_points");
    require(cfg.calibration.synthetic_P_exp_dbm.points >= 4, "need at least 4 points", "calibration.power_points");
    require(cfg.calibration.backbone.n_delta >= 2, "need at least 2 points", "calibration.delta_points");
    require(cfg.calibration.backbone.delta_max > cfg.calibration.backbone.delta_min &&
                cfg.calibration.backbone.delta_max < kBesselJ1FirstZero,
            "must lie between 1e-4 and the first zero of J1", "calibration.delta_max");
    require(cfg.calibration.synthetic_noise_hz >= 0.0, "noise must be nonnegative", "calibration.synthetic_noise");
    require(cfg.jpa.rbw_hz > 0.0, "bandwidth must be positive", "jpa.rbw");
    require(cfg.jpa.linewidth_hz > 0.0, "linewidth must be positive", "jpa.linewidth");
    require(cfg.jpa.f_hz.points >= 4, "need at least 4 points", "jpa.f_points");
    require(cfg.jpa.noise_rel >= 0.0, "noise must be nonnegative", "jpa.noise");
    require(cfg.jpa.P_p_w > 0.0 && cfg.jpa.P_s_w > 0.0, "powers must be positive", "jpa");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_schema() {
    std::ostringstream out;
    for (const Key& k : schema()) {
        out << k.section << '.' << k.name << "  [" << unit_name(k.kind) << "]  "
            << (k.required ? "required" : std::string("default ") + k.fallback) << "  " << k.help << '\n';
    }
    return out.str();
}

} // namespace imlambda
