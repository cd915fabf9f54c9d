#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <limits>
#include <random>

#include "kam/lp.hpp"
#include "kam/types.hpp"
#include "oracles.hpp"

using namespace kam;

namespace {

double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// The slack-maximization program in raw LP form, built here so the test does
// not depend on the engine's builder.
LinearProgram build_slack_lp(const oracle::KamInstance& inst) {
    const std::size_t n = inst.inputs.size();
    const std::size_t m = inst.eps_in.size();
    const std::size_t p = inst.eps_out.size();
    const std::size_t nv = n + m + p;
    const auto& xl = inst.inputs[inst.evaluated];
    const auto& yl = inst.outputs[inst.evaluated];

    LinearProgram lp;
    lp.objective.assign(nv, 0.0);
    for (std::size_t j = 0; j < m; ++j) lp.objective[n + j] = inst.w_in[j];
    for (std::size_t k = 0; k < p; ++k) lp.objective[n + m + k] = inst.w_out[k];

    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> row(nv, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = inst.inputs[i][j];
        row[n + j] = 1.0;
        lp.eq_lhs.push_back(std::move(row));
        lp.eq_rhs.push_back(xl[j] + inst.eps_in[j]);
    }
    for (std::size_t k = 0; k < p; ++k) {
        std::vector<double> row(nv, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = inst.outputs[i][k];
        row[n + m + k] = -1.0;
        lp.eq_lhs.push_back(std::move(row));
        lp.eq_rhs.push_back(yl[k] - inst.eps_out[k]);
    }
    std::vector<double> conv(nv, 0.0);
    std::fill(conv.begin(), conv.begin() + n, 1.0);
    lp.eq_lhs.push_back(std::move(conv));
    lp.eq_rhs.push_back(1.0);

    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> row(nv, 0.0);
        row[n + j] = -1.0;
        lp.ge_lhs.push_back(std::move(row));
        lp.ge_rhs.push_back(-xl[j]);
    }
    for (std::size_t k = 0; k < p; ++k) {
        std::vector<double> row(nv, 0.0);
        row[n + m + k] = 1.0;
        lp.ge_lhs.push_back(std::move(row));
        lp.ge_rhs.push_back(2.0 * inst.eps_out[k] - yl[k]);
    }
    return lp;
}

oracle::KamInstance random_instance(std::mt19937_64& gen, std::size_t n, std::size_t m,
                                    std::size_t p) {
    oracle::KamInstance inst;
    inst.inputs.resize(n);
    inst.outputs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) inst.inputs[i].push_back(uniform(gen, 1.0, 3.0));
        for (std::size_t k = 0; k < p; ++k)
            inst.outputs[i].push_back(uniform(gen, 1.0, 3.0));
    }
    inst.evaluated = gen() % n;
    // Rate below min(x)/max(x) so the slack upper guard cannot null a target.
    const double r = uniform(gen, 0.01, 0.32);
    for (std::size_t j = 0; j < m; ++j)
        inst.eps_in.push_back(r * inst.inputs[inst.evaluated][j]);
    for (std::size_t k = 0; k < p; ++k)
        inst.eps_out.push_back(r * inst.outputs[inst.evaluated][k]);
    for (std::size_t j = 0; j < m; ++j)
        inst.w_in.push_back(1.0 / inst.inputs[inst.evaluated][j]);
    for (std::size_t k = 0; k < p; ++k)
        inst.w_out.push_back(1.0 / inst.outputs[inst.evaluated][k]);
    return inst;
}

}  // namespace

TEST_CASE("equality-forced variable") {
    LinearProgram lp;
    lp.objective = {1.0};
    lp.eq_lhs = {{1.0}};
    lp.eq_rhs = {5.0};
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.values[0] == doctest::Approx(5.0));
    CHECK(s.objective == doctest::Approx(5.0));
}

TEST_CASE("two-point slack program has the closed-form optimum") {
    // max s-/10 + s+/7.1
    //   2 lA + 10 lB + s- = 11
    //   7 lA + 7.1 lB - s+ = 6.39
    //   lA + lB = 1, 10 - s- >= 0, 7.1 + s+ - 1.42 >= 0
    // Substituting lB = 1 - lA gives objective 0.2 + lA (0.8 - 1/71),
    // increasing in lA, so lA = 1, s- = 9, s+ = 0.61.
    LinearProgram lp;
    lp.objective = {0.0, 0.0, 0.1, 1.0 / 7.1};
    lp.eq_lhs = {{2.0, 10.0, 1.0, 0.0}, {7.0, 7.1, 0.0, -1.0}, {1.0, 1.0, 0.0, 0.0}};
    lp.eq_rhs = {11.0, 6.39, 1.0};
    lp.ge_lhs = {{0.0, 0.0, -1.0, 0.0}, {0.0, 0.0, 0.0, 1.0}};
    lp.ge_rhs = {-10.0, 1.42 - 7.1};
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.values[0] == doctest::Approx(1.0));
    CHECK(s.values[2] == doctest::Approx(9.0));
    CHECK(s.values[3] == doctest::Approx(0.61));
    CHECK(s.objective == doctest::Approx(0.9 + 0.61 / 7.1).epsilon(1e-9));
}

TEST_CASE("unbounded ray is reported") {
    LinearProgram lp;
    lp.objective = {1.0, 0.0};
    lp.eq_lhs = {{1.0, -1.0}};
    lp.eq_rhs = {0.0};
    CHECK(solve_lp(lp).status == LpStatus::unbounded);
}

TEST_CASE("infeasible system is reported") {
    LinearProgram lp;
    lp.objective = {1.0};
    lp.eq_lhs = {{1.0}, {1.0}};
    lp.eq_rhs = {1.0, 2.0};
    CHECK(solve_lp(lp).status == LpStatus::infeasible);
}

TEST_CASE("malformed programs are rejected") {
    LinearProgram lp;
    lp.objective = {1.0, 1.0};
    lp.eq_lhs = {{1.0}};  // wrong width
    lp.eq_rhs = {1.0};
    CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
    lp.eq_lhs = {{1.0, 1.0}};
    lp.eq_rhs = {std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
}

TEST_CASE("minimize sense") {
    LinearProgram lp;
    lp.sense = LinearProgram::Sense::minimize;
    lp.objective = {1.0, 2.0};
    lp.eq_lhs = {{1.0, 1.0}};
    lp.eq_rhs = {4.0};
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective == doctest::Approx(4.0));
    CHECK(s.values[0] == doctest::Approx(4.0));
}

TEST_CASE("objective matches the hull oracle on 850 one-factor programs") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 850; ++trial) {
        const std::size_t n = 1 + gen() % 200;
        oracle::KamInstance inst = random_instance(gen, n, 1, 1);
        LpSolution s = solve_lp(build_slack_lp(inst), 1e-9);
        REQUIRE(s.status == LpStatus::optimal);

        std::vector<oracle::Pt> pts;
        for (std::size_t i = 0; i < n; ++i)
            pts.push_back({inst.inputs[i][0], inst.outputs[i][0]});
        const auto best = oracle::best_slack_point(
            pts, inst.inputs[inst.evaluated][0], inst.outputs[inst.evaluated][0],
            inst.eps_in[0], inst.eps_out[0], inst.w_in[0], inst.w_out[0]);
        REQUIRE(std::fabs(s.objective - best.objective) <= 1e-6);
    }
}

TEST_CASE("objective matches the basis-enumeration oracle on 150 multi-factor programs") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t m, p, n;
        if (trial % 3 == 2) {  // exercise the five-slack cap with a tiny sample
            m = 2 + gen() % 2;
            p = 5 - m;
            n = 2 + gen() % 4;
        } else {
            m = 1 + gen() % 2;
            p = 1 + gen() % 2;
            n = 2 + gen() % 5;
        }
        oracle::KamInstance inst = random_instance(gen, n, m, p);
        LpSolution s = solve_lp(build_slack_lp(inst), 1e-9);
        REQUIRE(s.status == LpStatus::optimal);
        const double oracle_obj = oracle::best_slack_objective_bruteforce(inst);
        REQUIRE(std::fabs(s.objective - oracle_obj) <= 1e-6);
    }
}

TEST_CASE("re-solving is bitwise identical") {
    std::mt19937_64 gen(5);
    oracle::KamInstance inst = random_instance(gen, 60, 2, 2);
    const LinearProgram lp = build_slack_lp(inst);
    LpSolution a = solve_lp(lp);
    LpSolution b = solve_lp(lp);
    REQUIRE(a.values.size() == b.values.size());
    CHECK(std::memcmp(a.values.data(), b.values.data(),
                      a.values.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(&a.objective, &b.objective, sizeof(double)) == 0);
    CHECK(a.iterations == b.iterations);
}
