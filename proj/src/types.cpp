#include "kam/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace kam {

namespace {

bool all_finite_nonnegative(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return std::isfinite(x) && x >= 0.0; });
}

bool any_positive(const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

// Smallest positive entry of factor `j` (input or output side) across the
// sample, or nullopt if the whole column is zero.
std::optional<double> min_positive(const Sample& sample, bool input_side, std::size_t j) {
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (const Dmu& d : sample.dmus()) {
        double v = input_side ? d.inputs[j] : d.outputs[j];
        if (v > 0.0 && v < best) {
            best = v;
            found = true;
        }
    }
    if (!found) return std::nullopt;
    return best;
}

}  // namespace

Sample::Sample(std::vector<Dmu> dmus) : dmus_(std::move(dmus)) {
    if (dmus_.empty()) throw ConfigError("sample must contain at least one dmu");
    m_ = dmus_.front().inputs.size();
    p_ = dmus_.front().outputs.size();
    if (m_ == 0) throw ConfigError("sample needs at least one input factor");
    if (p_ == 0) throw ConfigError("sample needs at least one output factor");

    std::unordered_set<std::string> seen;
    for (const Dmu& d : dmus_) {
        if (d.id.empty()) throw ConfigError("dmu with empty id");
        if (!seen.insert(d.id).second)
            throw ConfigError("duplicate dmu id '" + d.id + "'");
        if (d.inputs.size() != m_ || d.outputs.size() != p_)
            throw ConfigError("dmu '" + d.id + "' has inconsistent factor counts");
        if (!all_finite_nonnegative(d.inputs) || !all_finite_nonnegative(d.outputs))
            throw ConfigError("dmu '" + d.id + "' has a negative or non-finite entry");
        if (!any_positive(d.inputs))
            throw ConfigError("dmu '" + d.id + "' has no positive input");
        if (!any_positive(d.outputs))
            throw ConfigError("dmu '" + d.id + "' has no positive output");
    }
}

EpsilonScheme EpsilonScheme::Zero() {
    EpsilonScheme s;
    s.mode = Mode::zero;
    s.rate = 0.0;
    return s;
}

EpsilonScheme EpsilonScheme::Proportional(double r) {
    EpsilonScheme s;
    s.mode = Mode::proportional;
    s.rate = r;
    return s;
}

EpsilonScheme EpsilonScheme::AbsoluteHalfMin() {
    EpsilonScheme s;
    s.mode = Mode::absolute_half_min;
    s.rate = 0.0;
    return s;
}

EpsilonScheme EpsilonScheme::Fixed(std::vector<double> eps_in, std::vector<double> eps_out) {
    EpsilonScheme s;
    s.mode = Mode::fixed;
    s.rate = 0.0;
    s.input_values = std::move(eps_in);
    s.output_values = std::move(eps_out);
    return s;
}

WeightScheme WeightScheme::Reciprocal() {
    WeightScheme s;
    s.mode = Mode::reciprocal_of_evaluated;
    return s;
}

WeightScheme WeightScheme::Fixed(std::vector<double> w_in, std::vector<double> w_out) {
    WeightScheme s;
    s.mode = Mode::fixed;
    s.input_values = std::move(w_in);
    s.output_values = std::move(w_out);
    return s;
}

DeltaRule DeltaRule::TenthOfEpsilon() {
    DeltaRule r;
    r.mode = Mode::tenth_of_epsilon;
    return r;
}

DeltaRule DeltaRule::EpsilonOverFactors() {
    DeltaRule r;
    r.mode = Mode::epsilon_over_factors;
    return r;
}

DeltaRule DeltaRule::Fixed(double delta) {
    DeltaRule r;
    r.mode = Mode::fixed;
    r.value = delta;
    return r;
}

FactorVectors resolve_epsilon(const EpsilonScheme& scheme, const Sample& sample,
                              std::size_t evaluated) {
    if (evaluated >= sample.size())
        throw ConfigError("evaluated dmu index out of range");
    const std::size_t m = sample.input_count();
    const std::size_t p = sample.output_count();
    const Dmu& d = sample.dmu(evaluated);

    switch (scheme.mode) {
        case EpsilonScheme::Mode::zero:
            return {std::vector<double>(m, 0.0), std::vector<double>(p, 0.0)};

        case EpsilonScheme::Mode::proportional: {
            // rate < 0.5 keeps the self-point (lambda = e_l, s = eps)
            // feasible against the output guard of the linear program.
            if (!(scheme.rate >= 0.0 && scheme.rate < 0.5))
                throw ConfigError("proportional epsilon rate must satisfy 0 <= r < 0.5");
            FactorVectors out;
            out.inputs.reserve(m);
            out.outputs.reserve(p);
            for (double x : d.inputs) out.inputs.push_back(scheme.rate * x);
            for (double y : d.outputs) out.outputs.push_back(scheme.rate * y);
            return out;
        }

        case EpsilonScheme::Mode::absolute_half_min: {
            FactorVectors out;
            out.inputs.resize(m);
            out.outputs.resize(p);
            for (std::size_t j = 0; j < m; ++j) {
                auto mp = min_positive(sample, true, j);
                if (!mp)
                    throw ConfigError("absolute-half-min epsilon: input factor " +
                                      std::to_string(j + 1) + " is zero across the sample");
                out.inputs[j] = 0.5 * *mp;
            }
            for (std::size_t k = 0; k < p; ++k) {
                auto mp = min_positive(sample, false, k);
                if (!mp)
                    throw ConfigError("absolute-half-min epsilon: output factor " +
                                      std::to_string(k + 1) + " is zero across the sample");
                out.outputs[k] = 0.5 * *mp;
            }
            return out;
        }

        case EpsilonScheme::Mode::fixed: {
            if (scheme.input_values.size() != m || scheme.output_values.size() != p)
                throw ConfigError("fixed epsilon vectors do not match sample dimensions");
            if (!all_finite_nonnegative(scheme.input_values) ||
                !all_finite_nonnegative(scheme.output_values))
                throw ConfigError("fixed epsilon vectors must be componentwise >= 0");
            return {scheme.input_values, scheme.output_values};
        }
    }
    throw ConfigError("unknown epsilon mode");
}

FactorVectors resolve_weights(const WeightScheme& scheme, const Sample& sample,
                              std::size_t evaluated) {
    if (evaluated >= sample.size())
        throw ConfigError("evaluated dmu index out of range");
    const std::size_t m = sample.input_count();
    const std::size_t p = sample.output_count();
    const Dmu& d = sample.dmu(evaluated);

    switch (scheme.mode) {
        case WeightScheme::Mode::reciprocal_of_evaluated: {
            FactorVectors out;
            out.inputs.resize(m);
            out.outputs.resize(p);
            for (std::size_t j = 0; j < m; ++j) {
                double x = d.inputs[j];
                if (x > 0.0) {
                    out.inputs[j] = 1.0 / x;
                } else {
                    auto mp = min_positive(sample, true, j);
                    if (!mp)
                        throw ConfigError("reciprocal weights: input factor " +
                                          std::to_string(j + 1) +
                                          " is zero across the sample");
                    out.inputs[j] = 1.0 / *mp;
                }
            }
            for (std::size_t k = 0; k < p; ++k) {
                double y = d.outputs[k];
                if (y > 0.0) {
                    out.outputs[k] = 1.0 / y;
                } else {
                    auto mp = min_positive(sample, false, k);
                    if (!mp)
                        throw ConfigError("reciprocal weights: output factor " +
                                          std::to_string(k + 1) +
                                          " is zero across the sample");
                    out.outputs[k] = 1.0 / *mp;
                }
            }
            return out;
        }

        case WeightScheme::Mode::fixed: {
            if (scheme.input_values.size() != m || scheme.output_values.size() != p)
                throw ConfigError("fixed weight vectors do not match sample dimensions");
            auto positive = [](const std::vector<double>& v) {
                return std::all_of(v.begin(), v.end(),
                                   [](double w) { return std::isfinite(w) && w > 0.0; });
            };
            if (!positive(scheme.input_values) || !positive(scheme.output_values))
                throw ConfigError("fixed weights must be componentwise > 0");
            return {scheme.input_values, scheme.output_values};
        }
    }
    throw ConfigError("unknown weight mode");
}

}  // namespace kam
