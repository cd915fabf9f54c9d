#include "kam/detector.hpp"

#include <algorithm>
#include <cmath>

namespace kam {

namespace {

std::vector<DmuEvaluation> evaluate_all(const Sample& sample, const KamConfig& config,
                                        bool with_nonlinear) {
    std::vector<DmuEvaluation> out;
    out.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        try {
            out.push_back(evaluate_dmu(sample, i, config, with_nonlinear));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw SolverError("evaluation failed for dmu '" + sample.dmu(i).id +
                              "': " + e.what());
        }
    }
    return out;
}

DiagnosticSeries build_series(const Sample& sample,
                              const std::vector<DmuEvaluation>& evaluations) {
    DiagnosticSeries diag;
    diag.series.resize(evaluations.size());
    for (std::size_t i = 0; i < evaluations.size(); ++i) {
        const KamScores& s = evaluations[i].scores;
        diag.series[i] = {s.ka_zero.value_or(0.0), s.ka_star, s.ka_tilde, s.sensitivity};
    }
    diag.order.resize(evaluations.size());
    for (std::size_t i = 0; i < diag.order.size(); ++i) diag.order[i] = i;
    std::sort(diag.order.begin(), diag.order.end(), [&](std::size_t a, std::size_t b) {
        if (diag.series[a].ka_zero != diag.series[b].ka_zero)
            return diag.series[a].ka_zero > diag.series[b].ka_zero;
        return sample.dmu(a).id < sample.dmu(b).id;
    });
    return diag;
}

// Population z-scores; all zero when the series has no spread.
std::vector<double> zscores(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<double> z(n, 0.0);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    if (sd <= 1e-12 * std::max(1.0, std::fabs(mean))) return z;
    for (std::size_t i = 0; i < n; ++i) z[i] = (values[i] - mean) / sd;
    return z;
}

}  // namespace

DiagnosticSeries evaluate_sample(const Sample& sample, const KamConfig& config) {
    return build_series(sample, evaluate_all(sample, config, false));
}

std::vector<OutlierFlags> flag_outliers(const DiagnosticSeries& diag,
                                        const DetectorThresholds& thresholds,
                                        const KamConfig& config) {
    const std::size_t n = diag.series.size();
    std::vector<double> ka_zero(n), ka_star(n);
    for (std::size_t i = 0; i < n; ++i) {
        ka_zero[i] = diag.series[i].ka_zero;
        ka_star[i] = diag.series[i].ka_star_eps;
    }
    const std::vector<double> z0 = zscores(ka_zero);
    const std::vector<double> zs = zscores(ka_star);

    std::vector<OutlierFlags> flags(n);
    for (std::size_t i = 0; i < n; ++i) {
        OutlierFlags& f = flags[i];
        const ScoreTuple& t = diag.series[i];
        f.zscore_ka_zero = z0[i];
        f.zscore_ka_star = zs[i];
        f.relative_drop = t.ka_zero > 0.0 ? (t.ka_zero - t.ka_star_eps) / t.ka_zero : 0.0;
        f.sensitivity_magnitude = t.sensitivity_eps > 0.0 ? 1.0 / t.sensitivity_eps : 0.0;

        const bool technically_efficient = t.ka_zero >= 1.0 - config.score_tolerance;
        f.case_i = z0[i] >= thresholds.z_much_greater;
        f.case_ii = zs[i] >= thresholds.z_much_greater;
        f.case_iii = f.relative_drop >= thresholds.drop_moderate;
        f.case_iv = technically_efficient &&
                    f.sensitivity_magnitude >= thresholds.sensitivity_cut;
    }
    return flags;
}

OutlierReport detect(const Sample& sample, const KamConfig& config,
                     const DetectorThresholds& thresholds, bool second_pass,
                     bool with_nonlinear) {
    OutlierReport report;
    report.config = config;
    report.thresholds = thresholds;
    report.ids.reserve(sample.size());
    for (const Dmu& d : sample.dmus()) report.ids.push_back(d.id);

    report.evaluations = evaluate_all(sample, config, with_nonlinear);
    report.diagnostics = build_series(sample, report.evaluations);
    report.flags = flag_outliers(report.diagnostics, thresholds, config);

    for (std::size_t idx : report.diagnostics.order)
        if (report.flags[idx].any()) report.outlier_ids.push_back(sample.dmu(idx).id);

    if (second_pass && !report.outlier_ids.empty()) {
        std::vector<Dmu> kept;
        kept.reserve(sample.size());
        for (std::size_t i = 0; i < sample.size(); ++i)
            if (!report.flags[i].any()) kept.push_back(sample.dmu(i));
        if (kept.empty()) {
            report.second_pass_degenerate = true;
        } else {
            Sample reduced(std::move(kept));
            report.second_pass = std::make_unique<OutlierReport>(
                detect(reduced, config, thresholds, false, with_nonlinear));
        }
    }
    return report;
}

}  // namespace kam
