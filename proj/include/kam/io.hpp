#pragma once

// File formats and run orchestration.
//
// Sample CSV: mandatory header, first column `id`, then `x:<name>` input and
// `y:<name>` output columns in any order; decimal reals; row order preserved.
//
// Report JSON: stable field order, numbers rounded to 12 significant digits.
// Chart exports: the four sorted score series as CSV rows or SVG polylines.

#include <optional>
#include <string>
#include <vector>

#include "kam/datagen.hpp"
#include "kam/detector.hpp"
#include "kam/types.hpp"

namespace kam {

// Shortest decimal string that round-trips the value (std::to_chars).
std::string format_double(double v);
// Locale-independent fixed significant-digit formatting.
std::string format_double(double v, int significant_digits);

Sample read_sample_csv(const std::string& path);
void write_sample_csv(const Sample& sample, const std::string& path);

ScenarioSpec read_scenario_spec(const std::string& path);
FactorVectors read_factor_vectors(const std::string& path);  // {"inputs":[],"outputs":[]}

void write_report_json(const OutlierReport& report, const std::string& path);

// `format` is "csv" or "svg"; anything else is a usage (config) error.
void export_polygon_chart(const DiagnosticSeries& diag,
                          const std::vector<std::string>& ids,
                          const std::string& path, const std::string& format);

struct RunManifest {
    std::optional<std::string> input_path;      // exactly one of these two
    std::optional<ScenarioSpec> generator;

    KamConfig config;
    DetectorThresholds thresholds;
    bool second_pass = false;
    bool with_nonlinear = false;

    std::string out_dir = "kam-out";
    bool export_report = true;   // report.json
    bool export_series = false;  // series.csv
    bool export_chart = false;   // chart.svg
};

// Reads or generates the sample, runs detection and writes the exports.
// Returns 0 on success or the error category as exit status, with the
// message printed to stderr. Never throws.
int run(const RunManifest& manifest);

}  // namespace kam
