#pragma once

// Slack-maximizing KAM evaluation of one DMU against a sample under
// variable returns to scale: the linear program, the three projected
// targets, the ratio scores, the delta-rule efficiency classification and
// the fractional (non-linear) score via Dinkelbach iteration.
//
// Everything here is a pure function of its arguments; evaluating different
// DMUs of one sample concurrently needs no coordination.

#include <cstddef>
#include <optional>

#include "kam/types.hpp"

namespace kam {

// Optimum of the linear KAM program for one evaluated DMU.
//
// The constraints solved are, for the resolved (eps-, eps+) and weights:
//   sum_i lambda_i x_ij + s-_j = x_lj + eps-_j          (all j)
//   sum_i lambda_i y_ik - s+_k = y_lk - eps+_k          (all k)
//   x_lj - s-_j >= 0,  y_lk + s+_k - 2 eps+_k >= 0
//   sum_i lambda_i = 1,  lambda, s-, s+ >= 0
// maximizing  sum_j w-_j s-_j + sum_k w+_k s+_k.
struct KamSolution {
    std::size_t evaluated = 0;
    FactorVectors epsilon;  // resolved vectors actually used
    FactorVectors weights;
    std::vector<double> input_slacks;   // s-*
    std::vector<double> output_slacks;  // s+*
    std::vector<double> intensities;    // lambda*; non-unique under ties
    double objective = 0.0;
};

struct TargetPoint {
    std::vector<double> inputs;
    std::vector<double> outputs;
};

// highest:        (x - s-,          y + s+)
// best_technical: (x - s- + eps-,   y + s+ - eps+)
// lowest:         (x - s- + 2 eps-, y + s+ - 2 eps+)
struct KamTargets {
    TargetPoint highest;
    TargetPoint best_technical;
    TargetPoint lowest;
};

// Ratio scores of the evaluated DMU against each target:
//   KA(target) = [sum w+ y_l / sum w- x_l] / [sum w+ y_t / sum w- x_t]
// sensitivity = ka_hat / ka_tilde.
struct KamScores {
    double ka_hat = 0.0;
    double ka_star = 0.0;
    double ka_tilde = 0.0;
    double sensitivity = 0.0;
    std::optional<double> ka_zero;       // 0-DF technical score, when computed
    std::optional<double> ka_nonlinear;  // fractional score, when computed
};

enum class EfficiencyKind { kam_efficient, inefficient };

struct EfficiencyClass {
    EfficiencyKind kind = EfficiencyKind::inefficient;
    double delta_used = 0.0;
    double gap = 0.0;  // ka_zero - ka_eps
};

KamSolution solve_linear_kam(const Sample& sample, std::size_t evaluated,
                             const KamConfig& config);

KamTargets compute_targets(const KamSolution& solution, const Sample& sample);

KamScores compute_scores(const KamSolution& solution, const KamTargets& targets,
                         const Sample& sample);

// The cutoff delta implied by config.delta_rule: 0.1 * eps_bar or
// eps_bar / (m + p), where eps_bar is the scalar scheme parameter
// (proportional rate, 0.5 for absolute-half-min, 0 for zero, the common
// entry of a homogeneous fixed scheme). Heterogeneous fixed epsilon with a
// scalar rule is a configuration error.
double resolve_delta(const KamConfig& config, std::size_t m, std::size_t p);

// A DMU is KAM efficient iff it is technically efficient at 0-DF
// (ka_zero = 1 within score_tolerance) and ka_zero - ka_eps <= delta.
EfficiencyClass classify_efficiency(double ka_zero, double ka_eps,
                                    const KamConfig& config, std::size_t m,
                                    std::size_t p);

// Optimum of the fractional program
//   min [1 + sum W-_j (E-_j - s-_j)] / [1 + sum W+_k (s+_k - E+_k)]
// over the equality-constrained set with E-_j = eps-_j / w-_j,
// E+_k = eps+_k / w+_k, W = w normalized by the evaluated DMU's weighted
// factor sums. Solved by Dinkelbach iteration (each step one LP),
// initialized at the linear score, tolerance 1e-8, cap 100 iterations.
double solve_nonlinear_kam(const Sample& sample, std::size_t evaluated,
                           const KamConfig& config);

// Full per-DMU evaluation: the 0-DF solve for ka_zero, the eps-DF solve,
// targets, scores and classification in one call.
struct DmuEvaluation {
    KamSolution solution;  // at config.epsilon
    KamTargets targets;
    KamScores scores;  // ka_zero always populated
    EfficiencyClass efficiency;
};

DmuEvaluation evaluate_dmu(const Sample& sample, std::size_t evaluated,
                           const KamConfig& config, bool with_nonlinear = false);

}  // namespace kam
