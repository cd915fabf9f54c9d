#pragma once

// Core domain model: DMUs, samples, run configuration and the resolution
// of epsilon/weight schemes into concrete per-factor vectors.
//
// All types are immutable value objects once constructed and can be shared
// freely across threads.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kam {

// Error categories double as CLI exit codes.
enum class ErrorCategory { parse = 2, config = 3, solver = 4, io = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorCategory::parse, what) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};
struct SolverError : Error {
    explicit SolverError(const std::string& what) : Error(ErrorCategory::solver, what) {}
};
struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

// One production unit: nonnegative input and output vectors.
struct Dmu {
    std::string id;
    std::vector<double> inputs;
    std::vector<double> outputs;
};

// A dimension-consistent, uniquely-labeled collection of DMUs.
// Validates on construction:
//   - n >= 1, every DMU has the same factor counts
//   - all entries >= 0, at least one positive input and output per DMU
//   - ids are unique and nonempty
class Sample {
public:
    explicit Sample(std::vector<Dmu> dmus);

    std::size_t size() const { return dmus_.size(); }
    std::size_t input_count() const { return m_; }
    std::size_t output_count() const { return p_; }
    const Dmu& dmu(std::size_t i) const { return dmus_.at(i); }
    const std::vector<Dmu>& dmus() const { return dmus_; }

private:
    std::vector<Dmu> dmus_;
    std::size_t m_ = 0;
    std::size_t p_ = 0;
};

// How the degree-of-freedom vectors (eps-, eps+) are derived per evaluated DMU.
struct EpsilonScheme {
    enum class Mode { zero, proportional, absolute_half_min, fixed };

    Mode mode = Mode::proportional;
    double rate = 0.1;                  // proportional only; feasibility needs 0 <= rate < 0.5
    std::vector<double> input_values;   // fixed only
    std::vector<double> output_values;  // fixed only

    static EpsilonScheme Zero();
    static EpsilonScheme Proportional(double r);
    static EpsilonScheme AbsoluteHalfMin();
    static EpsilonScheme Fixed(std::vector<double> eps_in, std::vector<double> eps_out);
};

// How the factor weights (w-, w+) are derived per evaluated DMU.
struct WeightScheme {
    enum class Mode { reciprocal_of_evaluated, fixed };

    Mode mode = Mode::reciprocal_of_evaluated;
    std::vector<double> input_values;   // fixed only
    std::vector<double> output_values;  // fixed only

    static WeightScheme Reciprocal();
    static WeightScheme Fixed(std::vector<double> w_in, std::vector<double> w_out);
};

// Rule turning the scalar scheme parameter into the efficiency cutoff delta.
struct DeltaRule {
    enum class Mode { tenth_of_epsilon, epsilon_over_factors, fixed };

    Mode mode = Mode::tenth_of_epsilon;
    double value = 0.0;  // fixed only

    static DeltaRule TenthOfEpsilon();
    static DeltaRule EpsilonOverFactors();
    static DeltaRule Fixed(double delta);
};

struct KamConfig {
    EpsilonScheme epsilon;
    WeightScheme weights;
    DeltaRule delta_rule;
    double lp_tolerance = 1e-9;
    double score_tolerance = 1e-7;
};

// A per-factor (inputs, outputs) pair of vectors; used for resolved
// epsilons and resolved weights.
struct FactorVectors {
    std::vector<double> inputs;
    std::vector<double> outputs;
};

// Resolve a scheme into concrete vectors for one evaluated DMU.
//
// proportional:       (rate * x_lj, rate * y_lk); requires 0 <= rate < 0.5
// absolute_half_min:  half the minimum positive entry per factor across the
//                     sample; identical for every evaluated DMU
// zero:               zero vectors
// fixed:              the configured vectors (dimension-checked)
FactorVectors resolve_epsilon(const EpsilonScheme& scheme, const Sample& sample,
                              std::size_t evaluated);

// reciprocal_of_evaluated: w_j = 1/x_lj and w_k = 1/y_lk. A zero entry falls
// back to 1 / (smallest positive value of that factor across the sample) so
// weights stay finite and scale-matched; a factor that is zero across the
// whole sample is a configuration error.
FactorVectors resolve_weights(const WeightScheme& scheme, const Sample& sample,
                              std::size_t evaluated);

}  // namespace kam
