#include "kam/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kam/lp.hpp"

namespace kam {

namespace {

// Variable layout shared by both formulations:
//   [ lambda_0 .. lambda_{n-1} | s-_0 .. s-_{m-1} | s+_0 .. s+_{p-1} ]
LinearProgram kam_constraint_rows(const Sample& sample, std::size_t l,
                                  const std::vector<double>& eps_in,
                                  const std::vector<double>& eps_out) {
    const std::size_t n = sample.size();
    const std::size_t m = sample.input_count();
    const std::size_t p = sample.output_count();
    const std::size_t nv = n + m + p;
    const Dmu& d = sample.dmu(l);

    LinearProgram lp;
    lp.objective.assign(nv, 0.0);
    lp.eq_lhs.reserve(m + p + 1);
    lp.eq_rhs.reserve(m + p + 1);

    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> row(nv, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = sample.dmu(i).inputs[j];
        row[n + j] = 1.0;
        lp.eq_lhs.push_back(std::move(row));
        lp.eq_rhs.push_back(d.inputs[j] + eps_in[j]);
    }
    for (std::size_t k = 0; k < p; ++k) {
        std::vector<double> row(nv, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = sample.dmu(i).outputs[k];
        row[n + m + k] = -1.0;
        lp.eq_lhs.push_back(std::move(row));
        lp.eq_rhs.push_back(d.outputs[k] - eps_out[k]);
    }
    {
        std::vector<double> row(nv, 0.0);
        std::fill(row.begin(), row.begin() + n, 1.0);
        lp.eq_lhs.push_back(std::move(row));
        lp.eq_rhs.push_back(1.0);
    }
    return lp;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

KamSolution solve_linear_kam(const Sample& sample, std::size_t evaluated,
                             const KamConfig& config) {
    const std::size_t n = sample.size();
    const std::size_t m = sample.input_count();
    const std::size_t p = sample.output_count();
    const Dmu& d = sample.dmu(evaluated);

    FactorVectors eps = resolve_epsilon(config.epsilon, sample, evaluated);
    FactorVectors w = resolve_weights(config.weights, sample, evaluated);

    LinearProgram lp = kam_constraint_rows(sample, evaluated, eps.inputs, eps.outputs);
    for (std::size_t j = 0; j < m; ++j) lp.objective[n + j] = w.inputs[j];
    for (std::size_t k = 0; k < p; ++k) lp.objective[n + m + k] = w.outputs[k];

    // Guards: x_lj - s-_j >= 0 and y_lk + s+_k - 2 eps+_k >= 0.
    const std::size_t nv = lp.variable_count();
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> row(nv, 0.0);
        row[n + j] = -1.0;
        lp.ge_lhs.push_back(std::move(row));
        lp.ge_rhs.push_back(-d.inputs[j]);
    }
    for (std::size_t k = 0; k < p; ++k) {
        std::vector<double> row(nv, 0.0);
        row[n + m + k] = 1.0;
        lp.ge_lhs.push_back(std::move(row));
        lp.ge_rhs.push_back(2.0 * eps.outputs[k] - d.outputs[k]);
    }

    LpSolution lps = solve_lp(lp, config.lp_tolerance);
    if (lps.status == LpStatus::infeasible)
        throw ConfigError("epsilon configuration makes the program infeasible for dmu '" +
                          d.id + "'");
    if (lps.status == LpStatus::unbounded)
        throw SolverError("linear program unbounded for dmu '" + d.id + "'");

    KamSolution sol;
    sol.evaluated = evaluated;
    sol.epsilon = std::move(eps);
    sol.weights = std::move(w);
    sol.intensities.assign(lps.values.begin(), lps.values.begin() + n);
    sol.input_slacks.assign(lps.values.begin() + n, lps.values.begin() + n + m);
    sol.output_slacks.assign(lps.values.begin() + n + m, lps.values.end());
    sol.objective = lps.objective;

    // Snap basic-at-zero noise so targets and scores do not wobble by an ulp
    // with the pivot path (a vertex DMU must score exactly 1 at 0-DF
    // whatever the sample order). The threshold sits far below lp_tolerance
    // so the constraint residuals stay within it.
    double scale = 1.0;
    for (double v : d.inputs) scale = std::max(scale, v);
    for (double v : d.outputs) scale = std::max(scale, v);
    const double snap = 1e-12 * scale;
    auto snap_zero = [snap](std::vector<double>& vals) {
        for (double& v : vals)
            if (std::fabs(v) <= snap) v = 0.0;
    };
    snap_zero(sol.intensities);
    snap_zero(sol.input_slacks);
    snap_zero(sol.output_slacks);
    return sol;
}

KamTargets compute_targets(const KamSolution& solution, const Sample& sample) {
    const Dmu& d = sample.dmu(solution.evaluated);
    const std::size_t m = sample.input_count();
    const std::size_t p = sample.output_count();

    KamTargets t;
    t.highest.inputs.resize(m);
    t.best_technical.inputs.resize(m);
    t.lowest.inputs.resize(m);
    t.highest.outputs.resize(p);
    t.best_technical.outputs.resize(p);
    t.lowest.outputs.resize(p);

    for (std::size_t j = 0; j < m; ++j) {
        const double base = d.inputs[j] - solution.input_slacks[j];
        const double e = solution.epsilon.inputs[j];
        t.highest.inputs[j] = base;
        t.best_technical.inputs[j] = base + e;
        t.lowest.inputs[j] = base + 2.0 * e;
    }
    for (std::size_t k = 0; k < p; ++k) {
        const double base = d.outputs[k] + solution.output_slacks[k];
        const double e = solution.epsilon.outputs[k];
        t.highest.outputs[k] = base;
        t.best_technical.outputs[k] = base - e;
        t.lowest.outputs[k] = base - 2.0 * e;
    }
    return t;
}

KamScores compute_scores(const KamSolution& solution, const KamTargets& targets,
                         const Sample& sample) {
    const Dmu& d = sample.dmu(solution.evaluated);
    const std::vector<double>& wi = solution.weights.inputs;
    const std::vector<double>& wo = solution.weights.outputs;

    const double own_in = dot(wi, d.inputs);
    const double own_out = dot(wo, d.outputs);
    const double floor_in = 1e-9 * std::max(1.0, own_in);
    const double floor_out = 1e-9 * std::max(1.0, own_out);

    auto score_against = [&](const TargetPoint& t, const char* name) {
        const double tin = dot(wi, t.inputs);
        const double tout = dot(wo, t.outputs);
        if (tin <= floor_in || tout <= floor_out)
            throw SolverError(std::string("degenerate score for dmu '") + d.id +
                              "': " + name + " target has a zero weighted aggregate");
        return (own_out / own_in) / (tout / tin);
    };

    KamScores s;
    s.ka_hat = score_against(targets.highest, "highest");
    s.ka_star = score_against(targets.best_technical, "best-technical");
    s.ka_tilde = score_against(targets.lowest, "lowest");
    s.sensitivity = s.ka_hat / s.ka_tilde;
    return s;
}

double resolve_delta(const KamConfig& config, std::size_t m, std::size_t p) {
    if (config.delta_rule.mode == DeltaRule::Mode::fixed) {
        if (!(config.delta_rule.value >= 0.0))
            throw ConfigError("fixed delta must be >= 0");
        return config.delta_rule.value;
    }

    double eps_bar = 0.0;
    switch (config.epsilon.mode) {
        case EpsilonScheme::Mode::zero:
            eps_bar = 0.0;
            break;
        case EpsilonScheme::Mode::proportional:
            eps_bar = config.epsilon.rate;
            break;
        case EpsilonScheme::Mode::absolute_half_min:
            // The scheme's defining multiplier names it (a "0.5-DF" run).
            eps_bar = 0.5;
            break;
        case EpsilonScheme::Mode::fixed: {
            const auto& in = config.epsilon.input_values;
            const auto& out = config.epsilon.output_values;
            if (in.empty() || out.empty())
                throw ConfigError("fixed epsilon vectors are empty");
            const double v = in.front();
            auto same = [v](double x) { return x == v; };
            if (!std::all_of(in.begin(), in.end(), same) ||
                !std::all_of(out.begin(), out.end(), same))
                throw ConfigError(
                    "delta rule needs a scalar epsilon; use a fixed delta with "
                    "heterogeneous fixed epsilon vectors");
            eps_bar = v;
            break;
        }
    }

    if (!(eps_bar >= 0.0))
        throw ConfigError("delta rule needs a nonnegative scalar epsilon");
    if (config.delta_rule.mode == DeltaRule::Mode::tenth_of_epsilon)
        return 0.1 * eps_bar;
    return eps_bar / static_cast<double>(m + p);
}

EfficiencyClass classify_efficiency(double ka_zero, double ka_eps,
                                    const KamConfig& config, std::size_t m,
                                    std::size_t p) {
    EfficiencyClass c;
    c.delta_used = resolve_delta(config, m, p);
    c.gap = ka_zero - ka_eps;
    const bool technically_efficient = ka_zero >= 1.0 - config.score_tolerance;
    c.kind = technically_efficient && c.gap <= c.delta_used
                 ? EfficiencyKind::kam_efficient
                 : EfficiencyKind::inefficient;
    return c;
}

double solve_nonlinear_kam(const Sample& sample, std::size_t evaluated,
                           const KamConfig& config) {
    const std::size_t n = sample.size();
    const std::size_t m = sample.input_count();
    const std::size_t p = sample.output_count();
    const Dmu& d = sample.dmu(evaluated);

    FactorVectors eps = resolve_epsilon(config.epsilon, sample, evaluated);
    FactorVectors w = resolve_weights(config.weights, sample, evaluated);

    const double own_in = dot(w.inputs, d.inputs);
    const double own_out = dot(w.outputs, d.outputs);

    std::vector<double> w_in_norm(m), w_out_norm(p), big_e_in(m), big_e_out(p);
    for (std::size_t j = 0; j < m; ++j) {
        w_in_norm[j] = w.inputs[j] / own_in;
        big_e_in[j] = eps.inputs[j] / w.inputs[j];
    }
    for (std::size_t k = 0; k < p; ++k) {
        w_out_norm[k] = w.outputs[k] / own_out;
        big_e_out[k] = eps.outputs[k] / w.outputs[k];
    }

    // Ratio numerator/denominator as affine functions of the slack block.
    auto numerator = [&](const std::vector<double>& z) {
        double v = 1.0;
        for (std::size_t j = 0; j < m; ++j)
            v += w_in_norm[j] * (big_e_in[j] - z[n + j]);
        return v;
    };
    auto denominator = [&](const std::vector<double>& z) {
        double v = 1.0;
        for (std::size_t k = 0; k < p; ++k)
            v += w_out_norm[k] * (z[n + m + k] - big_e_out[k]);
        return v;
    };

    LinearProgram lp = kam_constraint_rows(sample, evaluated, big_e_in, big_e_out);
    lp.sense = LinearProgram::Sense::minimize;

    // Initialize at the linear score; the fractional optimum is not above it
    // for the data regimes this engine is run on.
    double q;
    {
        KamSolution lin = solve_linear_kam(sample, evaluated, config);
        q = compute_scores(lin, compute_targets(lin, sample), sample).ka_star;
    }

    constexpr int kMaxIterations = 100;
    constexpr double kTolerance = 1e-8;
    double gap = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        // min N(z) - q D(z): constants drop out of the LP objective.
        for (std::size_t j = 0; j < m; ++j) lp.objective[n + j] = -w_in_norm[j];
        for (std::size_t k = 0; k < p; ++k) lp.objective[n + m + k] = -q * w_out_norm[k];

        LpSolution lps = solve_lp(lp, config.lp_tolerance);
        if (lps.status == LpStatus::infeasible)
            throw ConfigError(
                "epsilon configuration makes the fractional program infeasible for dmu '" +
                d.id + "'");
        if (lps.status == LpStatus::unbounded)
            throw SolverError("fractional subproblem unbounded for dmu '" + d.id + "'");

        const double num = numerator(lps.values);
        const double den = denominator(lps.values);
        if (den <= config.lp_tolerance)
            throw SolverError("degenerate fractional score for dmu '" + d.id +
                              "': nonpositive denominator");
        gap = num - q * den;
        q = num / den;
        if (std::fabs(gap) <= kTolerance) return q;
    }
    throw SolverError("fractional iteration did not converge for dmu '" + d.id +
                      "'; last parametric gap " + std::to_string(gap));
}

DmuEvaluation evaluate_dmu(const Sample& sample, std::size_t evaluated,
                           const KamConfig& config, bool with_nonlinear) {
    KamConfig zero_config = config;
    zero_config.epsilon = EpsilonScheme::Zero();

    KamSolution zero_solution = solve_linear_kam(sample, evaluated, zero_config);
    const double ka_zero =
        compute_scores(zero_solution, compute_targets(zero_solution, sample), sample)
            .ka_star;

    DmuEvaluation ev;
    ev.solution = solve_linear_kam(sample, evaluated, config);
    ev.targets = compute_targets(ev.solution, sample);
    ev.scores = compute_scores(ev.solution, ev.targets, sample);
    ev.scores.ka_zero = ka_zero;
    ev.efficiency =
        classify_efficiency(ka_zero, ev.scores.ka_star, config,
                            sample.input_count(), sample.output_count());
    if (with_nonlinear)
        ev.scores.ka_nonlinear = solve_nonlinear_kam(sample, evaluated, config);
    return ev;
}

}  // namespace kam
