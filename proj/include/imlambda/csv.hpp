#pragma once

#include "imlambda/calibration.hpp"
#include "imlambda/jpa.hpp"

#include <string>
#include <utility>
#include <vector>

namespace imlambda {

// Numeric table with '#'-prefixed "key = value" metadata lines.
struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const; // IoError if absent
    std::vector<double> values(const std::string& name) const;
    const std::string* find_meta(const std::string& key) const;
};

/// 12 significant digits, '.' decimal point regardless of locale.
std::string format_number(double v);

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// Schema (P_exp_dBm, f_r_Hz).
CsvTable calibration_table(const CalibDataset& data);
CalibDataset calibration_from_table(const CsvTable& table);

// Schema (f_Hz, P_out_W) with pump_f_Hz, RBW_Hz, Gs_dB, Gi_dB metadata.
CsvTable jpa_trace_table(const JpaTrace& trace, double pump_hz, double rbw_hz, double gs_db, double gi_db);

struct JpaTraceFile {
    JpaTrace trace;
    JpaModel model;
};

JpaTraceFile jpa_trace_from_table(const CsvTable& table);

} // namespace imlambda
