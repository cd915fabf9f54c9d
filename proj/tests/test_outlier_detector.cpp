#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "kam/detector.hpp"

using namespace kam;

namespace {

Sample ab_sample() {
    return Sample({{"A", {2.0}, {7.0}}, {"B", {10.0}, {7.1}}});
}

KamConfig default_config(double r = 0.1) {
    KamConfig c;
    c.epsilon = EpsilonScheme::Proportional(r);
    c.weights = WeightScheme::Reciprocal();
    c.delta_rule = DeltaRule::TenthOfEpsilon();
    return c;
}

double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

Sample random_sample(std::mt19937_64& gen, std::size_t max_n = 10) {
    const std::size_t n = 2 + gen() % max_n;
    std::vector<Dmu> dmus;
    for (std::size_t i = 0; i < n; ++i)
        dmus.push_back({"d" + std::to_string(i),
                        {uniform(gen, 1.0, 2.4)},
                        {uniform(gen, 1.0, 2.4)}});
    return Sample(std::move(dmus));
}

}  // namespace

TEST_CASE("exemplar series: both technically efficient, B collapses under DF") {
    Sample s = ab_sample();
    DiagnosticSeries diag = evaluate_sample(s, default_config());
    REQUIRE(diag.order.size() == 2);
    // Tie on ka_zero = 1 broken by id: A first.
    CHECK(diag.order[0] == 0);
    CHECK(diag.order[1] == 1);

    CHECK(diag.series[0].ka_zero == doctest::Approx(1.0));
    CHECK(diag.series[0].ka_star_eps == doctest::Approx(1.0));
    CHECK(diag.series[0].ka_tilde_eps == doctest::Approx(1.22222).epsilon(1e-4));
    CHECK(diag.series[0].sensitivity_eps == doctest::Approx(0.66942).epsilon(1e-4));

    CHECK(diag.series[1].ka_zero == doctest::Approx(1.0));
    CHECK(diag.series[1].ka_star_eps == doctest::Approx(0.20286).epsilon(1e-4));
    CHECK(diag.series[1].ka_tilde_eps == doctest::Approx(0.33863).epsilon(1e-4));
    CHECK(diag.series[1].sensitivity_eps == doctest::Approx(0.27192).epsilon(1e-3));
}

TEST_CASE("single-dmu series is trivially efficient") {
    Sample s({{"A", {2.0}, {7.0}}});
    DiagnosticSeries diag = evaluate_sample(s, default_config());
    REQUIRE(diag.series.size() == 1);
    CHECK(diag.series[0].ka_zero == doctest::Approx(1.0));
    CHECK(diag.series[0].ka_star_eps == doctest::Approx(1.0));
}

TEST_CASE("identical DMUs yield identical tuples and no flags") {
    std::vector<Dmu> dmus;
    for (int i = 0; i < 5; ++i)
        dmus.push_back({"d" + std::to_string(i), {3.0}, {4.0}});
    Sample s(std::move(dmus));
    KamConfig cfg = default_config();
    DiagnosticSeries diag = evaluate_sample(s, cfg);
    for (const ScoreTuple& t : diag.series) {
        CHECK(t.ka_zero == doctest::Approx(diag.series[0].ka_zero));
        CHECK(t.ka_star_eps == doctest::Approx(diag.series[0].ka_star_eps));
    }
    std::vector<OutlierFlags> flags = flag_outliers(diag, DetectorThresholds{}, cfg);
    for (const OutlierFlags& f : flags) CHECK_FALSE(f.any());
}

TEST_CASE("exemplar flags: B via cases iii and iv, A clean") {
    Sample s = ab_sample();
    KamConfig cfg = default_config();
    DiagnosticSeries diag = evaluate_sample(s, cfg);
    std::vector<OutlierFlags> flags = flag_outliers(diag, DetectorThresholds{}, cfg);
    REQUIRE(flags.size() == 2);

    CHECK_FALSE(flags[0].any());
    CHECK(flags[0].relative_drop == doctest::Approx(0.0));
    CHECK(flags[0].sensitivity_magnitude == doctest::Approx(121.0 / 81.0).epsilon(1e-6));

    CHECK(flags[1].case_iii);
    CHECK(flags[1].case_iv);
    CHECK_FALSE(flags[1].case_i);  // n = 2: zero-spread z-cases stay quiet
    CHECK_FALSE(flags[1].case_ii);
    CHECK(flags[1].relative_drop == doctest::Approx(279.0 / 350.0).epsilon(1e-6));
    CHECK(flags[1].sensitivity_magnitude == doctest::Approx(3.6773).epsilon(1e-3));
}

TEST_CASE("detect: exemplar report and clean second pass") {
    Sample s = ab_sample();
    OutlierReport report = detect(s, default_config(), DetectorThresholds{}, true);
    REQUIRE(report.outlier_ids.size() == 1);
    CHECK(report.outlier_ids[0] == "B");
    CHECK_FALSE(report.second_pass_degenerate);
    REQUIRE(report.second_pass != nullptr);
    CHECK(report.second_pass->ids == std::vector<std::string>{"A"});
    CHECK(report.second_pass->outlier_ids.empty());
    CHECK(report.second_pass->second_pass == nullptr);  // one level deep
}

TEST_CASE("detect: no outliers means no second pass") {
    std::vector<Dmu> dmus;
    for (int i = 0; i < 4; ++i)
        dmus.push_back({"d" + std::to_string(i), {3.0}, {4.0}});
    OutlierReport report =
        detect(Sample(std::move(dmus)), default_config(), DetectorThresholds{}, true);
    CHECK(report.outlier_ids.empty());
    CHECK(report.second_pass == nullptr);
    CHECK_FALSE(report.second_pass_degenerate);
}

TEST_CASE("detect: all DMUs flagged degenerates the second pass") {
    // At rate 0.2 a self-benchmarking efficient DMU already shows
    // 1/S = (1.2/0.8)^2 = 2.25, so identical DMUs all trip case iv and the
    // exclusion pass has nothing left to evaluate.
    std::vector<Dmu> dmus;
    for (int i = 0; i < 3; ++i)
        dmus.push_back({"d" + std::to_string(i), {3.0}, {4.0}});
    OutlierReport report =
        detect(Sample(std::move(dmus)), default_config(0.2), DetectorThresholds{}, true);
    REQUIRE(report.outlier_ids.size() == 3);
    CHECK(report.second_pass_degenerate);
    CHECK(report.second_pass == nullptr);
}

TEST_CASE("case iv requires technical efficiency") {
    DiagnosticSeries diag;
    diag.order = {0, 1};
    diag.series = {{1.0, 0.5, 2.0, 0.25}, {0.8, 0.4, 1.6, 0.25}};
    std::vector<OutlierFlags> flags =
        flag_outliers(diag, DetectorThresholds{}, default_config());
    CHECK(flags[0].case_iv);        // efficient, 1/S = 4
    CHECK_FALSE(flags[1].case_iv);  // same magnitude but ka_zero < 1
}

TEST_CASE("property: flags are antitone in every threshold") {
    std::mt19937_64 gen(21);
    KamConfig cfg = default_config();
    for (int trial = 0; trial < 60; ++trial) {
        Sample s = random_sample(gen);
        DiagnosticSeries diag = evaluate_sample(s, cfg);
        DetectorThresholds lo{uniform(gen, 0.5, 2.0), uniform(gen, 0.1, 0.5),
                              uniform(gen, 1.0, 2.0)};
        DetectorThresholds hi{lo.z_much_greater + uniform(gen, 0.0, 1.0),
                              lo.drop_moderate + uniform(gen, 0.0, 0.4),
                              lo.sensitivity_cut + uniform(gen, 0.0, 1.5)};
        std::vector<OutlierFlags> a = flag_outliers(diag, lo, cfg);
        std::vector<OutlierFlags> b = flag_outliers(diag, hi, cfg);
        for (std::size_t i = 0; i < a.size(); ++i) {
            // Raising thresholds can only clear flags, never add them.
            if (b[i].case_i) REQUIRE(a[i].case_i);
            if (b[i].case_ii) REQUIRE(a[i].case_ii);
            if (b[i].case_iii) REQUIRE(a[i].case_iii);
            if (b[i].case_iv) REQUIRE(a[i].case_iv);
        }
    }
}

TEST_CASE("property: detect is deterministic and order-stable under permutation") {
    std::mt19937_64 gen(22);
    KamConfig cfg = default_config();
    for (int trial = 0; trial < 25; ++trial) {
        Sample s = random_sample(gen, 8);
        OutlierReport r1 = detect(s, cfg, DetectorThresholds{}, false);
        OutlierReport r2 = detect(s, cfg, DetectorThresholds{}, false);
        REQUIRE(r1.outlier_ids == r2.outlier_ids);
        for (std::size_t i = 0; i < s.size(); ++i) {
            REQUIRE(r1.diagnostics.series[i].ka_zero == r2.diagnostics.series[i].ka_zero);
            REQUIRE(r1.diagnostics.series[i].ka_star_eps ==
                    r2.diagnostics.series[i].ka_star_eps);
        }

        // Shuffle the sample; per-id values and flags must be unchanged.
        std::vector<Dmu> shuffled = s.dmus();
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[gen() % i]);
        Sample sp(std::move(shuffled));
        OutlierReport rp = detect(sp, cfg, DetectorThresholds{}, false);

        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto it = std::find(rp.ids.begin(), rp.ids.end(), r1.ids[i]);
            REQUIRE(it != rp.ids.end());
            const std::size_t j = static_cast<std::size_t>(it - rp.ids.begin());
            REQUIRE(std::fabs(r1.diagnostics.series[i].ka_zero -
                              rp.diagnostics.series[j].ka_zero) <= 1e-12);
            REQUIRE(std::fabs(r1.diagnostics.series[i].ka_star_eps -
                              rp.diagnostics.series[j].ka_star_eps) <= 1e-12);
            REQUIRE(r1.flags[i].any() == rp.flags[j].any());
        }
        // Presentation order follows the documented tie-break, so the sorted
        // id sequence must agree as well.
        std::vector<std::string> seq1, seq2;
        for (std::size_t idx : r1.diagnostics.order) seq1.push_back(r1.ids[idx]);
        for (std::size_t idx : rp.diagnostics.order) seq2.push_back(rp.ids[idx]);
        REQUIRE(seq1 == seq2);
    }
}

TEST_CASE("sorted order is nonincreasing in the technical score") {
    std::mt19937_64 gen(23);
    KamConfig cfg = default_config();
    for (int trial = 0; trial < 40; ++trial) {
        Sample s = random_sample(gen);
        DiagnosticSeries diag = evaluate_sample(s, cfg);
        for (std::size_t r = 1; r < diag.order.size(); ++r)
            REQUIRE(diag.series[diag.order[r - 1]].ka_zero >=
                    diag.series[diag.order[r]].ka_zero);
    }
}
