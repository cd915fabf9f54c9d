#pragma once

// Whole-sample diagnostics and outlier flagging.
//
// Every DMU is scored twice (0-DF and the configured eps-DF); the four
// resulting series, sorted by descending technical score, are the polygon
// chart data. Four flag cases mark a DMU as an outlier:
//   i   technical score (0-DF) far above the sample distribution (z-score)
//   ii  best technical score (eps-DF) far above the distribution (z-score)
//   iii best technical score drops by at least `drop_moderate` relative to
//       the technical score
//   iv  technically efficient with a strong spread between highest and
//       lowest scores, i.e. 1/sensitivity at or above `sensitivity_cut`
//
// A second pass re-runs detection on the sample minus the first-pass
// outliers (one level deep).

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "kam/engine.hpp"
#include "kam/types.hpp"

namespace kam {

struct ScoreTuple {
    double ka_zero = 0.0;
    double ka_star_eps = 0.0;
    double ka_tilde_eps = 0.0;
    double sensitivity_eps = 0.0;
};

struct DiagnosticSeries {
    // Sample indices sorted by descending ka_zero, ties by id ascending.
    std::vector<std::size_t> order;
    // Per-DMU tuples, indexed by original sample position.
    std::vector<ScoreTuple> series;
};

struct OutlierFlags {
    bool case_i = false;
    bool case_ii = false;
    bool case_iii = false;
    bool case_iv = false;
    double zscore_ka_zero = 0.0;
    double zscore_ka_star = 0.0;
    double relative_drop = 0.0;
    double sensitivity_magnitude = 0.0;  // 1 / sensitivity

    bool any() const { return case_i || case_ii || case_iii || case_iv; }
};

struct DetectorThresholds {
    double z_much_greater = 2.0;
    double drop_moderate = 0.5;
    double sensitivity_cut = 2.0;  // applied to 1/sensitivity
};

struct OutlierReport {
    KamConfig config;
    DetectorThresholds thresholds;
    std::vector<std::string> ids;  // original sample order
    DiagnosticSeries diagnostics;
    std::vector<DmuEvaluation> evaluations;  // original sample order
    std::vector<OutlierFlags> flags;         // original sample order
    std::vector<std::string> outlier_ids;    // presentation (sorted) order
    std::unique_ptr<OutlierReport> second_pass;
    bool second_pass_degenerate = false;  // all DMUs flagged, nothing left
};

DiagnosticSeries evaluate_sample(const Sample& sample, const KamConfig& config);

// Z-based cases are vacuously false when a score series has zero spread.
std::vector<OutlierFlags> flag_outliers(const DiagnosticSeries& diag,
                                        const DetectorThresholds& thresholds,
                                        const KamConfig& config);

OutlierReport detect(const Sample& sample, const KamConfig& config,
                     const DetectorThresholds& thresholds, bool second_pass,
                     bool with_nonlinear = false);

}  // namespace kam
