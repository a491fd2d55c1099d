#include "imlambda/csv.hpp"

#include "imlambda/errors.hpp"
#include "imlambda/units.hpp"
#include "imlambda/version.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace imlambda {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, int line) {
    const std::string t = trim(field);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        if (t == "nan") return std::nan("");
        if (t == "inf") return INFINITY;
        if (t == "-inf") return -INFINITY;
        throw IoError("line " + std::to_string(line) + ": not a number: '" + t + "'");
    }
    return v;
}

double meta_number(const CsvTable& t, const std::string& key) {
    const std::string* v = t.find_meta(key);
    if (!v) throw IoError("missing metadata '" + key + "'");
    return parse_double(*v, 0);
}

} // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
        if (columns[k] == name) return k;
    throw IoError("missing column '" + name + "'");
}

std::vector<double> CsvTable::values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

const std::string* CsvTable::find_meta(const std::string& key) const {
    for (const auto& [k, v] : meta)
        if (k == key) return &v;
    return nullptr;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 11);
    return std::string(buf, ptr);
}

std::string to_csv(const CsvTable& table) {
    std::ostringstream out;
    out << "# imlambda " << kVersion << '\n';
    for (const auto& [k, v] : table.meta) out << "# " << k << " = " << v << '\n';
    for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << table.columns[k];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
        out << '\n';
    }
    return out.str();
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty()) continue;
        if (s[0] == '#') {
            const std::string body = trim(s.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string::npos) t.meta.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(s);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(trim(f));
        if (!have_header) {
            t.columns = fields;
            have_header = true;
            continue;
        }
        if (fields.size() != t.columns.size())
            throw IoError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                          " fields, got " + std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& x : fields) row.push_back(parse_double(x, lineno));
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw IoError("CSV has no header line");
    return t;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << to_csv(table);
    if (!out) throw IoError("write to '" + path + "' failed");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_csv(ss.str());
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

CsvTable calibration_table(const CalibDataset& data) {
    CsvTable t;
    t.columns = {"P_exp_dBm", "f_r_Hz"};
    for (std::size_t k = 0; k < data.P_exp_dbm.size(); ++k)
        t.rows.push_back({data.P_exp_dbm[k], angular_to_hz(data.omega_r[k])});
    return t;
}

CalibDataset calibration_from_table(const CsvTable& t) {
    CalibDataset d;
    d.P_exp_dbm = t.values("P_exp_dBm");
    for (double f : t.values("f_r_Hz")) d.omega_r.push_back(hz_to_angular(f));
    return d;
}

CsvTable jpa_trace_table(const JpaTrace& trace, double pump_hz, double rbw_hz, double gs_db, double gi_db) {
    CsvTable t;
    t.meta = {{"pump_f_Hz", format_number(pump_hz)},
              {"RBW_Hz", format_number(rbw_hz)},
              {"Gs_dB", format_number(gs_db)},
              {"Gi_dB", format_number(gi_db)}};
    t.columns = {"f_Hz", "P_out_W"};
    for (std::size_t k = 0; k < trace.omega.size(); ++k) t.rows.push_back({angular_to_hz(trace.omega[k]), trace.P_out[k]});
    return t;
}

JpaTraceFile jpa_trace_from_table(const CsvTable& t) {
    JpaTraceFile f;
    for (double hz : t.values("f_Hz")) f.trace.omega.push_back(hz_to_angular(hz));
    f.trace.P_out = t.values("P_out_W");
    f.model.omega_a = hz_to_angular(meta_number(t, "pump_f_Hz"));
    f.model.B = hz_to_angular(meta_number(t, "RBW_Hz"));
    f.model.G_s = Gain::from_db(meta_number(t, "Gs_dB"));
    f.model.G_i = Gain::from_db(meta_number(t, "Gi_dB"));
    return f;
}

} // namespace imlambda
