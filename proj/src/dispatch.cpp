#include "imlambda/dispatch.hpp"

#include "imlambda/calibration.hpp"
#include "imlambda/csv.hpp"
#include "imlambda/dressed.hpp"
#include "imlambda/errors.hpp"
#include "imlambda/jpa.hpp"
#include "imlambda/matching.hpp"
#include "imlambda/spectrum.hpp"
#include "imlambda/steady_state.hpp"
#include "imlambda/units.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

namespace imlambda {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Writer {
    const RunConfig& config;
    std::string command;
    std::filesystem::path dir;
    std::ostream* log;
    std::vector<std::string> written;

    CsvTable table(std::vector<std::string> columns) const {
        CsvTable t;
        t.meta.emplace_back("command", command);
        for (const auto& kv : config.resolved) t.meta.push_back(kv);
        t.columns = std::move(columns);
        return t;
    }

    void write(const std::string& name, const CsvTable& t) {
        const std::string path = (dir / name).string();
        write_csv(path, t);
        written.push_back(path);
        if (log) *log << "wrote " << path << " (" << t.rows.size() << " rows)\n";
    }

    void note(const std::string& line) const {
        if (log) *log << line << '\n';
    }
};

double hz(double w) { return angular_to_hz(w); }

void run_dressed(Writer& w) {
    const RunConfig& c = w.config;
    const DeviceModel device = c.device();
    CsvTable t = w.table({"P_d_dBm", "E1_Hz", "E2_Hz", "E3_Hz", "E4_Hz", "w41_Hz", "w31_Hz", "w42_Hz", "w32_Hz",
                          "kappa41_Hz", "kappa42_Hz", "kappa31_Hz", "kappa32_Hz", "gamma21_Hz", "gamma43_Hz",
                          "label_ambiguous"});
    DressedBasis prev;
    bool first = true;
    for (const double p : c.dressed.P_d_dbm.values()) {
        const DriveSpec drive = device.drive(c.delta_wd, dbm_to_watts(p));
        DressedBasis basis = dress(device, drive).basis;
        bool ambiguous = false;
        if (!first) {
            const LabelTracking tr = track_labels(prev, basis);
            basis = apply_labels(basis, tr);
            ambiguous = tr.ambiguous;
        }
        first = false;
        prev = basis;
        const RateTable rates = decay_rates(basis, c.damping);
        const Eigen::Matrix4d k = rates.kappa_wg();
        const Eigen::Matrix4d g = rates.gamma_qb();
        t.rows.push_back({p, hz(basis.energies[0]), hz(basis.energies[1]), hz(basis.energies[2]),
                          hz(basis.energies[3]), hz(lab_transition(basis, 3, 0, drive.w_d)),
                          hz(lab_transition(basis, 2, 0, drive.w_d)), hz(lab_transition(basis, 3, 1, drive.w_d)),
                          hz(lab_transition(basis, 2, 1, drive.w_d)), hz(k(3, 0)), hz(k(3, 1)), hz(k(2, 0)),
                          hz(k(2, 1)), hz(g(1, 0)), hz(g(3, 2)), ambiguous ? 1.0 : 0.0});
    }
    for (const Branch b : {Branch::Upper4, Branch::Upper3}) {
        const std::string key = "P_d0_branch" + std::to_string(branch_label(b)) + "_dBm";
        try {
            const BalancedDrive bd = find_balanced_drive(device, c.delta_wd, b, c.match.options);
            t.meta.emplace_back(key, format_number(bd.P_d_dbm));
            w.note(key + " = " + format_number(bd.P_d_dbm));
        } catch (const NotMatchableError& e) {
            t.meta.emplace_back(key, std::string("none (") + e.what() + ")");
        }
    }
    w.write("dressed.csv", t);
}

void run_reflect(Writer& w) {
    const RunConfig& c = w.config;
    const DeviceModel device = c.device();
    ReflectionGrid grid;
    for (const double f : c.reflect.f_hz.values()) grid.omega_p.push_back(hz_to_angular(f));
    grid.P_d_dbm = c.reflect.P_d_dbm.values();
    const ReflectionMap map = sweep_reflection(device, c.delta_wd, grid, dbm_to_watts(c.P_p_dbm), {c.reflect.Q});

    CsvTable t = w.table({"omega_p_Hz", "P_d_dBm", "abs_r", "arg_r_rad", "flags"});
    std::size_t failures = 0;
    for (std::size_t ip = 0; ip < grid.P_d_dbm.size(); ++ip)
        for (std::size_t iw = 0; iw < grid.omega_p.size(); ++iw) {
            const std::size_t k = map.index(ip, iw);
            failures += (map.flags[k] & kFlagSolverFailure) ? 1 : 0;
            t.rows.push_back({hz(grid.omega_p[iw]), grid.P_d_dbm[ip], std::abs(map.r[k]), std::arg(map.r[k]),
                              static_cast<double>(map.flags[k])});
        }
    w.write("reflection.csv", t);
    if (failures) w.note("solver failures: " + std::to_string(failures));

    CsvTable tc = w.table({"P_d_dBm", "w41_Hz", "w31_Hz", "w42_Hz", "w32_Hz", "w21_Hz", "w43_Hz", "label_ambiguous"});
    for (const TransitionCurves& cv : map.curves)
        tc.rows.push_back({cv.P_d_dbm, hz(cv.w41), hz(cv.w31), hz(cv.w42), hz(cv.w32), hz(cv.w21), hz(cv.w43),
                           cv.label_ambiguous ? 1.0 : 0.0});
    w.write("transitions.csv", tc);
}

void run_spectrum(Writer& w) {
    const RunConfig& c = w.config;
    const DeviceModel device = c.device();
    const double P_p = dbm_to_watts(c.P_p_dbm);
    DriveSpec drive;
    ProbeSpec probe{c.w_p, P_p};
    if (c.spectrum.at_dip) {
        MatchOptions mo = c.match.options;
        mo.Q = c.spectrum.Q;
        const MatchPoint m = find_dip(device, c.delta_wd, P_p, c.spectrum.branch, mo);
        drive = device.drive(c.delta_wd, m.P_d_star);
        probe.w_p = m.omega_p_star;
        w.note("dip: P_d* = " + format_number(m.P_d_star_dbm) + " dBm, f_p* = " + format_number(hz(m.omega_p_star)) +
               " Hz, |r| = " + format_number(m.r_min));
    } else {
        drive = device.drive(c.delta_wd, dbm_to_watts(c.P_d_dbm));
        if (probe.w_p == 0.0) probe.w_p = lab_transition(dress(device, drive).basis, 3, 0, drive.w_d);
    }
    const SpectrumReport rep = spectrum_at(device, drive, probe, c.spectrum.options, c.spectrum.Q);

    CsvTable t = w.table({"omega_Hz", "S_W_per_Hz", "flux_per_Hz"});
    for (std::size_t k = 0; k < rep.trace.omega.size(); ++k)
        t.rows.push_back({hz(rep.trace.omega[k]), rep.trace.S[k] * kTwoPi, rep.trace.flux_density[k] * kTwoPi});
    w.write("spectrum.csv", t);

    const PeakInfo peak = principal_peak(rep.trace);
    const double w42 = lab_transition(rep.point.basis, 3, 1, drive.w_d);
    CsvTable e = w.table({"eta", "window_Hz", "window_lo_Hz", "window_hi_Hz", "P_p_dBm", "P_d_dBm", "omega_p_Hz",
                          "peak_Hz", "fwhm_Hz", "w42_Hz"});
    e.rows.push_back({rep.eta, hz(rep.window.second - rep.window.first), hz(rep.window.first), hz(rep.window.second),
                      c.P_p_dbm, watts_to_dbm(drive.P_d), hz(probe.w_p), hz(peak.omega), hz(peak.fwhm), hz(w42)});
    w.write("efficiency.csv", e);
    w.note("eta = " + format_number(rep.eta));
}

void run_match(Writer& w) {
    const RunConfig& c = w.config;
    const DeviceModel device = c.device();
    const double P_p = dbm_to_watts(c.P_p_dbm);

    CsvTable tb = w.table({"branch", "P_d0_dBm", "imbalance"});
    CsvTable tm = w.table({"delta_omega_d_Hz", "P_d_star_dBm", "omega_p_star_Hz", "r_min", "branch"});
    for (const Branch b : c.match.branches) {
        const BalancedDrive bd = find_balanced_drive(device, c.delta_wd, b, c.match.options);
        tb.rows.push_back({static_cast<double>(branch_label(b)), bd.P_d_dbm, bd.imbalance});
        const MatchPoint m = find_dip(device, c.delta_wd, P_p, b, c.match.options);
        tm.rows.push_back({hz(c.delta_wd), m.P_d_star_dbm, hz(m.omega_p_star), m.r_min,
                           static_cast<double>(branch_label(b))});
        w.note("branch " + std::to_string(branch_label(b)) + ": P_d0 = " + format_number(bd.P_d_dbm) +
               " dBm, dip at " + format_number(m.P_d_star_dbm) + " dBm, |r| = " + format_number(m.r_min));
    }
    w.write("balanced.csv", tb);
    w.write("match.csv", tm);

    if (c.match.level_detuning_hz.points > 0) {
        std::vector<double> deltas;
        for (const double d : c.match.level_detuning_hz.values()) deltas.push_back(hz_to_angular(d));
        const auto level =
            level_diagram_sweep(device, deltas, dbm_to_watts(c.match.level_P_p_dbm), c.match.options);
        CsvTable tl = w.table({"delta_omega_d_Hz", "ok", "P_d_star_dBm", "omega_p_star_Hz", "r_min", "w31_Hz",
                               "w42_Hz", "w32_Hz"});
        for (const LevelPoint& p : level) {
            if (!p.ok) w.note("level point " + format_number(hz(p.delta_wd)) + " Hz failed: " + p.error);
            tl.rows.push_back({hz(p.delta_wd), p.ok ? 1.0 : 0.0, p.ok ? p.match.P_d_star_dbm : kNaN,
                               p.ok ? hz(p.match.omega_p_star) : kNaN, p.ok ? p.match.r_min : kNaN,
                               p.ok ? hz(p.w31) : kNaN, p.ok ? hz(p.w42) : kNaN, p.ok ? hz(p.w32) : kNaN});
        }
        w.write("level_diagram.csv", tl);
    }
}

void run_calibrate(Writer& w) {
    const CalibrationConfig& c = w.config.calibration;
    const Backbone bb = backbone(c.model, c.backbone);
    CsvTable tb = w.table({"delta", "f_r_Hz", "P_p_dBm"});
    tb.meta.emplace_back("folded", bb.folded ? "true" : "false");
    tb.meta.emplace_back("f_linear_Hz", format_number(hz(bb.omega_linear)));
    for (const BackbonePoint& p : bb.points) tb.rows.push_back({p.delta, hz(p.omega_r), p.P_p_dbm});
    w.write("backbone.csv", tb);

    CalibDataset data;
    if (c.data_path.empty()) {
        data = synthetic_calibration(c.model, c.synthetic_x, c.synthetic_P_exp_dbm.values(), c.synthetic_noise_hz,
                                     c.synthetic_seed, c.backbone);
        CsvTable td = calibration_table(data);
        td.meta.insert(td.meta.begin(), {"command", w.command});
        td.meta.insert(td.meta.end(), w.config.resolved.begin(), w.config.resolved.end());
        w.write("calibration_data.csv", td);
    } else {
        data = calibration_from_table(read_csv(c.data_path));
    }

    const CalibFit fit = fit_calibration(data, c.model, c.guess, {{}, c.backbone});
    CsvTable tf = w.table({"x", "I0_A", "Zcpw_ohm", "residual_Hz", "iterations"});
    tf.rows.push_back({fit.x, fit.I0, fit.Z_cpw, hz(fit.residual), static_cast<double>(fit.iterations)});
    w.write("calibration_fit.csv", tf);

    NetworkModel fitted = c.model;
    fitted.I0 = fit.I0;
    fitted.Z_cpw = fit.Z_cpw;
    const auto model_w = model_resonances(fitted, fit.x, data.P_exp_dbm, c.backbone);
    CsvTable tr = w.table({"P_exp_dBm", "f_r_meas_Hz", "f_r_model_Hz"});
    for (std::size_t k = 0; k < data.P_exp_dbm.size(); ++k)
        tr.rows.push_back({data.P_exp_dbm[k], hz(data.omega_r[k]), hz(model_w[k])});
    w.write("calibration_model.csv", tr);
    w.note("fit: x = " + format_number(fit.x) + ", I0 = " + format_number(fit.I0) + " A, Z_cpw = " +
           format_number(fit.Z_cpw) + " ohm, rms = " + format_number(hz(fit.residual)) + " Hz");
}

void run_fit_jpa(Writer& w) {
    const JpaConfig& c = w.config.jpa;
    JpaTrace trace;
    JpaModel model;
    if (c.trace_path.empty()) {
        model.omega_a = hz_to_angular(c.pump_hz);
        model.B = hz_to_angular(c.rbw_hz);
        model.G_s = Gain::from_db(c.Gs_db);
        model.G_i = Gain::from_db(c.Gi_db);
        LorentzianSignal truth;
        truth.omega_s = hz_to_angular(c.signal_hz);
        truth.delta_omega = hz_to_angular(c.linewidth_hz);
        truth.S0 = c.P_s_w / (kTwoPi * truth.delta_omega / 4.0);
        for (const double f : c.f_hz.values()) trace.omega.push_back(hz_to_angular(f));
        trace.P_out = jpa_output(model, truth, trace.omega);
        std::mt19937_64 rng(c.seed);
        std::normal_distribution<double> noise(0.0, c.noise_rel);
        for (double& p : trace.P_out) p *= 1.0 + noise(rng);
        CsvTable tt = jpa_trace_table(trace, c.pump_hz, c.rbw_hz, c.Gs_db, c.Gi_db);
        tt.meta.insert(tt.meta.begin(), {"command", w.command});
        tt.meta.insert(tt.meta.end(), w.config.resolved.begin(), w.config.resolved.end());
        w.write("jpa_trace.csv", tt);
    } else {
        const JpaTraceFile f = jpa_trace_from_table(read_csv(c.trace_path));
        trace = f.trace;
        model = f.model;
    }
    const std::size_t peak = assign_signal_peak(trace, model, hz_to_angular(c.signal_hz));
    const JpaFit fit = fit_jpa_spectrum(trace, model, guess_signal(trace, model, peak));
    const MeasuredEfficiency eff = measured_efficiency(fit.signal.power(), c.P_p_w, hz_to_angular(c.probe_hz),
                                                       fit.signal.omega_s, c.gain_uncertainty_db);
    CsvTable t = w.table({"f_s_Hz", "linewidth_Hz", "S0_W_per_Hz", "P_s_W", "residual", "iterations", "eta",
                          "eta_lower", "eta_upper"});
    t.rows.push_back({hz(fit.signal.omega_s), hz(fit.signal.delta_omega), fit.signal.S0 * kTwoPi, fit.signal.power(),
                      fit.residual, static_cast<double>(fit.iterations), eff.eta, eff.lower, eff.upper});
    w.write("jpa_fit.csv", t);
    w.note("P_s = " + format_number(fit.signal.power()) + " W, eta = " + format_number(eff.eta));
}

} // namespace

std::vector<std::string> subcommands() { return {"dressed", "reflect", "spectrum", "match", "calibrate", "fit-jpa"}; }

std::vector<std::string> dispatch(const std::string& command, const RunConfig& config, const std::string& out_dir,
                                  std::ostream* log) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    Writer w{config, command, out_dir, log, {}};
    if (command == "dressed") run_dressed(w);
    else if (command == "reflect") run_reflect(w);
    else if (command == "spectrum") run_spectrum(w);
    else if (command == "match") run_match(w);
    else if (command == "calibrate") run_calibrate(w);
    else if (command == "fit-jpa") run_fit_jpa(w);
    else throw ConfigError("unknown subcommand '" + command + "'");
    return w.written;
}

int exit_code(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (dynamic_cast<const IoError*>(&e)) return 3;
    if (dynamic_cast<const Error*>(&e)) return 2;
    return 4;
}

} // namespace imlambda
