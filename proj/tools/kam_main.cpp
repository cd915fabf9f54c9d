// Command-line front end: score a CSV sample (or a generated scenario),
// detect outliers and export the report and polygon-chart series.
//
// Exit codes: 0 ok, 2 parse, 3 config, 4 solver, 5 io.

#include <charconv>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kam/io.hpp"

namespace {

bool parse_real(const std::string& token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

kam::EpsilonScheme parse_epsilon(const std::string& token) {
    if (token == "zero") return kam::EpsilonScheme::Zero();
    if (token == "halfmin") return kam::EpsilonScheme::AbsoluteHalfMin();
    double r = 0.0;
    if (parse_real(token, r)) return kam::EpsilonScheme::Proportional(r);
    kam::FactorVectors v = kam::read_factor_vectors(token);
    return kam::EpsilonScheme::Fixed(std::move(v.inputs), std::move(v.outputs));
}

kam::WeightScheme parse_weights(const std::string& token) {
    if (token == "reciprocal") return kam::WeightScheme::Reciprocal();
    kam::FactorVectors v = kam::read_factor_vectors(token);
    return kam::WeightScheme::Fixed(std::move(v.inputs), std::move(v.outputs));
}

kam::DeltaRule parse_delta(const std::string& token) {
    if (token == "tenth") return kam::DeltaRule::TenthOfEpsilon();
    if (token == "overfactors") return kam::DeltaRule::EpsilonOverFactors();
    double v = 0.0;
    if (parse_real(token, v)) return kam::DeltaRule::Fixed(v);
    throw kam::ConfigError("--delta expects 'tenth', 'overfactors' or a number, got '" +
                           token + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KAM efficiency scoring and outlier detection"};

    std::string input, generate_spec;
    std::string epsilon = "0.1", weights = "reciprocal", delta = "tenth";
    std::string out_dir = "kam-out", chart = "svg";
    kam::DetectorThresholds thresholds;
    bool pass2 = false, nonlinear = false;

    app.add_option("--input", input, "sample CSV file (header: id,x:*,y:*)");
    app.add_option("--generate", generate_spec, "scenario spec JSON file");
    app.add_option("--epsilon", epsilon,
                   "DF scheme: rate r, 'halfmin', 'zero' or a vector JSON file");
    app.add_option("--weights", weights, "'reciprocal' or a vector JSON file");
    app.add_option("--delta", delta, "'tenth', 'overfactors' or a fixed value");
    app.add_option("--z", thresholds.z_much_greater, "z-score cut for cases i/ii");
    app.add_option("--drop", thresholds.drop_moderate, "relative drop cut for case iii");
    app.add_option("--sens", thresholds.sensitivity_cut,
                   "1/sensitivity cut for case iv");
    app.add_flag("--pass2", pass2, "re-run detection on the sample minus outliers");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--chart", chart, "chart export: svg, csv or none");
    app.add_flag("--nonlinear", nonlinear, "add the fractional score to the report");

    CLI11_PARSE(app, argc, argv);

    kam::RunManifest manifest;
    try {
        if (!input.empty()) manifest.input_path = input;
        if (!generate_spec.empty())
            manifest.generator = kam::read_scenario_spec(generate_spec);
        manifest.config.epsilon = parse_epsilon(epsilon);
        manifest.config.weights = parse_weights(weights);
        manifest.config.delta_rule = parse_delta(delta);
        manifest.thresholds = thresholds;
        manifest.second_pass = pass2;
        manifest.with_nonlinear = nonlinear;
        manifest.out_dir = out_dir;
        if (chart == "svg") {
            manifest.export_chart = true;
        } else if (chart == "csv") {
            manifest.export_series = true;
        } else if (chart != "none") {
            throw kam::ConfigError("unsupported chart format '" + chart + "'");
        }
    } catch (const kam::Error& e) {
        std::cerr << (e.category() == kam::ErrorCategory::parse ? "parse error: "
                                                                : "config error: ")
                  << e.what() << "\n";
        return static_cast<int>(e.category());
    }

    return kam::run(manifest);
}
