#include "kam/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace kam {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(trimmed(line.substr(start)));
            return out;
        }
        out.push_back(trimmed(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

double parse_number(const std::string& token, std::size_t line_no) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || token.empty())
        throw ParseError("line " + std::to_string(line_no) + ": not a number: '" +
                         token + "'");
    if (!std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
    return v;
}

// Round to `sig` significant digits by reparsing the formatted text, so the
// serialized JSON number carries exactly that much precision.
double round_significant(double v, int sig) {
    if (!std::isfinite(v)) return v;
    const std::string s = format_double(v, sig);
    return std::strtod(s.c_str(), nullptr);
}

double round12(double v) { return round_significant(v, 12); }

ordered_json json_vector(const std::vector<double>& v) {
    ordered_json arr = ordered_json::array();
    for (double x : v) arr.push_back(round12(x));
    return arr;
}

ordered_json epsilon_to_json(const EpsilonScheme& e) {
    ordered_json j;
    switch (e.mode) {
        case EpsilonScheme::Mode::zero:
            j["mode"] = "zero";
            break;
        case EpsilonScheme::Mode::proportional:
            j["mode"] = "proportional";
            j["rate"] = round12(e.rate);
            break;
        case EpsilonScheme::Mode::absolute_half_min:
            j["mode"] = "absolute-half-min";
            break;
        case EpsilonScheme::Mode::fixed:
            j["mode"] = "fixed";
            j["inputs"] = json_vector(e.input_values);
            j["outputs"] = json_vector(e.output_values);
            break;
    }
    return j;
}

ordered_json weights_to_json(const WeightScheme& w) {
    ordered_json j;
    if (w.mode == WeightScheme::Mode::reciprocal_of_evaluated) {
        j["mode"] = "reciprocal-of-evaluated";
    } else {
        j["mode"] = "fixed";
        j["inputs"] = json_vector(w.input_values);
        j["outputs"] = json_vector(w.output_values);
    }
    return j;
}

ordered_json delta_to_json(const DeltaRule& d) {
    ordered_json j;
    switch (d.mode) {
        case DeltaRule::Mode::tenth_of_epsilon:
            j["mode"] = "tenth-of-epsilon";
            break;
        case DeltaRule::Mode::epsilon_over_factors:
            j["mode"] = "epsilon-over-factors";
            break;
        case DeltaRule::Mode::fixed:
            j["mode"] = "fixed";
            j["value"] = round12(d.value);
            break;
    }
    return j;
}

ordered_json target_to_json(const TargetPoint& t) {
    ordered_json j;
    j["inputs"] = json_vector(t.inputs);
    j["outputs"] = json_vector(t.outputs);
    return j;
}

ordered_json report_to_json(const OutlierReport& r) {
    ordered_json j;
    j["format_version"] = 1;
    ordered_json cfg;
    cfg["epsilon"] = epsilon_to_json(r.config.epsilon);
    cfg["weights"] = weights_to_json(r.config.weights);
    cfg["delta_rule"] = delta_to_json(r.config.delta_rule);
    cfg["lp_tolerance"] = round12(r.config.lp_tolerance);
    cfg["score_tolerance"] = round12(r.config.score_tolerance);
    ordered_json th;
    th["z_much_greater"] = round12(r.thresholds.z_much_greater);
    th["drop_moderate"] = round12(r.thresholds.drop_moderate);
    th["sensitivity_cut"] = round12(r.thresholds.sensitivity_cut);
    cfg["thresholds"] = th;
    j["config"] = cfg;
    j["n"] = r.ids.size();

    ordered_json dmus = ordered_json::array();
    for (std::size_t rank = 0; rank < r.diagnostics.order.size(); ++rank) {
        const std::size_t i = r.diagnostics.order[rank];
        const DmuEvaluation& ev = r.evaluations[i];
        const OutlierFlags& f = r.flags[i];

        ordered_json d;
        d["id"] = r.ids[i];
        d["rank"] = rank + 1;

        ordered_json scores;
        scores["ka_zero"] = round12(ev.scores.ka_zero.value_or(0.0));
        scores["ka_hat"] = round12(ev.scores.ka_hat);
        scores["ka_star"] = round12(ev.scores.ka_star);
        scores["ka_tilde"] = round12(ev.scores.ka_tilde);
        scores["sensitivity"] = round12(ev.scores.sensitivity);
        if (ev.scores.ka_nonlinear)
            scores["ka_nonlinear"] = round12(*ev.scores.ka_nonlinear);
        d["scores"] = scores;

        ordered_json cls;
        cls["kam_efficient"] = ev.efficiency.kind == EfficiencyKind::kam_efficient;
        cls["delta"] = round12(ev.efficiency.delta_used);
        cls["gap"] = round12(ev.efficiency.gap);
        d["classification"] = cls;

        ordered_json flags;
        flags["case_i"] = f.case_i;
        flags["case_ii"] = f.case_ii;
        flags["case_iii"] = f.case_iii;
        flags["case_iv"] = f.case_iv;
        flags["outlier"] = f.any();
        d["flags"] = flags;

        ordered_json measures;
        measures["zscore_ka_zero"] = round12(f.zscore_ka_zero);
        measures["zscore_ka_star"] = round12(f.zscore_ka_star);
        measures["relative_drop"] = round12(f.relative_drop);
        measures["sensitivity_magnitude"] = round12(f.sensitivity_magnitude);
        d["measures"] = measures;

        ordered_json targets;
        targets["highest"] = target_to_json(ev.targets.highest);
        targets["best_technical"] = target_to_json(ev.targets.best_technical);
        targets["lowest"] = target_to_json(ev.targets.lowest);
        d["targets"] = targets;

        dmus.push_back(std::move(d));
    }
    j["dmus"] = dmus;

    ordered_json outliers = ordered_json::array();
    for (const std::string& id : r.outlier_ids) outliers.push_back(id);
    j["outliers"] = outliers;
    j["second_pass_degenerate"] = r.second_pass_degenerate;
    j["second_pass"] = r.second_pass ? report_to_json(*r.second_pass) : ordered_json();
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

// Fixed two-decimal coordinates keep the SVG byte-stable.
std::string svg_num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, ptr);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string format_double(double v, int significant_digits) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, significant_digits);
    return std::string(buf, ptr);
}

Sample read_sample_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open input file '" + path + "'");

    std::string line;
    std::size_t line_no = 0;

    // Header: id, then x:<name> / y:<name> columns in any order.
    if (!std::getline(in, line)) throw ParseError("missing header row in '" + path + "'");
    ++line_no;
    const std::vector<std::string> header = split_fields(line);
    if (header.empty() || header[0] != "id")
        throw ParseError("line 1: first header column must be 'id'");

    enum class Kind { input, output };
    std::vector<Kind> kinds;
    std::vector<std::size_t> slots;
    std::size_t m = 0, p = 0;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string& h = header[c];
        if (h.rfind("x:", 0) == 0) {
            kinds.push_back(Kind::input);
            slots.push_back(m++);
        } else if (h.rfind("y:", 0) == 0) {
            kinds.push_back(Kind::output);
            slots.push_back(p++);
        } else {
            throw ParseError("line 1: column '" + h + "' must start with 'x:' or 'y:'");
        }
    }
    if (m == 0) throw ParseError("line 1: no input (x:) column");
    if (p == 0) throw ParseError("line 1: no output (y:) column");

    std::vector<Dmu> dmus;
    std::vector<std::string> seen_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
        Dmu d;
        d.id = fields[0];
        if (d.id.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty id");
        if (std::find(seen_ids.begin(), seen_ids.end(), d.id) != seen_ids.end())
            throw ParseError("line " + std::to_string(line_no) + ": duplicate id '" +
                             d.id + "'");
        seen_ids.push_back(d.id);
        d.inputs.assign(m, 0.0);
        d.outputs.assign(p, 0.0);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            const double v = parse_number(fields[c], line_no);
            if (v < 0.0)
                throw ParseError("line " + std::to_string(line_no) +
                                 ": negative value in column '" + header[c] + "'");
            if (kinds[c - 1] == Kind::input)
                d.inputs[slots[c - 1]] = v;
            else
                d.outputs[slots[c - 1]] = v;
        }
        if (std::none_of(d.inputs.begin(), d.inputs.end(), [](double v) { return v > 0; }))
            throw ParseError("line " + std::to_string(line_no) + ": dmu '" + d.id +
                             "' has no positive input");
        if (std::none_of(d.outputs.begin(), d.outputs.end(),
                         [](double v) { return v > 0; }))
            throw ParseError("line " + std::to_string(line_no) + ": dmu '" + d.id +
                             "' has no positive output");
        dmus.push_back(std::move(d));
    }
    if (dmus.empty()) throw ParseError("no data rows in '" + path + "'");
    return Sample(std::move(dmus));
}

void write_sample_csv(const Sample& sample, const std::string& path) {
    std::ostringstream out;
    out << "id";
    for (std::size_t j = 0; j < sample.input_count(); ++j) out << ",x:x" << (j + 1);
    for (std::size_t k = 0; k < sample.output_count(); ++k) out << ",y:y" << (k + 1);
    out << "\n";
    for (const Dmu& d : sample.dmus()) {
        out << d.id;
        for (double v : d.inputs) out << ',' << format_double(v);
        for (double v : d.outputs) out << ',' << format_double(v);
        out << "\n";
    }
    write_text_file(path, out.str());
}

ScenarioSpec read_scenario_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scenario spec '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("scenario spec '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw ConfigError("scenario spec must be a JSON object");

    ScenarioSpec spec;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "seed")
                spec.seed = value.get<std::uint64_t>();
            else if (key == "n_clean")
                spec.n_clean = value.get<std::size_t>();
            else if (key == "frontier_scale")
                spec.frontier_scale = value.get<double>();
            else if (key == "frontier_exponent")
                spec.frontier_exponent = value.get<double>();
            else if (key == "x_low")
                spec.x_low = value.get<double>();
            else if (key == "x_high")
                spec.x_high = value.get<double>();
            else if (key == "inefficiency_rate")
                spec.inefficiency_rate = value.get<double>();
            else if (key == "n_spikes")
                spec.n_spikes = value.get<std::size_t>();
            else if (key == "n_nfd")
                spec.n_nfd = value.get<std::size_t>();
            else if (key == "spike_lift")
                spec.spike_lift = value.get<double>();
            else
                throw ConfigError("scenario spec: unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("scenario spec: bad value for '" + key + "'");
        }
    }
    return spec;
}

FactorVectors read_factor_vectors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open vector file '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("vector file '" + path + "': " + e.what());
    }
    if (!j.is_object() || !j.contains("inputs") || !j.contains("outputs"))
        throw ConfigError("vector file needs 'inputs' and 'outputs' arrays");
    FactorVectors v;
    try {
        v.inputs = j["inputs"].get<std::vector<double>>();
        v.outputs = j["outputs"].get<std::vector<double>>();
    } catch (const std::exception&) {
        throw ConfigError("vector file arrays must hold numbers");
    }
    return v;
}

void write_report_json(const OutlierReport& report, const std::string& path) {
    write_text_file(path, report_to_json(report).dump(2) + "\n");
}

void export_polygon_chart(const DiagnosticSeries& diag,
                          const std::vector<std::string>& ids,
                          const std::string& path, const std::string& format) {
    if (diag.order.empty()) throw ConfigError("cannot chart an empty series");
    if (diag.series.size() != ids.size())
        throw std::invalid_argument("series/id count mismatch");

    if (format == "csv") {
        std::ostringstream out;
        out << "rank,id,ka_zero,ka_star_eps,ka_tilde_eps,sensitivity_eps\n";
        for (std::size_t rank = 0; rank < diag.order.size(); ++rank) {
            const std::size_t i = diag.order[rank];
            const ScoreTuple& t = diag.series[i];
            out << (rank + 1) << ',' << ids[i] << ',' << format_double(round12(t.ka_zero))
                << ',' << format_double(round12(t.ka_star_eps)) << ','
                << format_double(round12(t.ka_tilde_eps)) << ','
                << format_double(round12(t.sensitivity_eps)) << "\n";
        }
        write_text_file(path, out.str());
        return;
    }
    if (format != "svg") throw ConfigError("unsupported chart format '" + format + "'");

    const std::size_t n = diag.order.size();
    const double width = 880, height = 500;
    const double left = 60, right = width - 170, top = 30, bottom = height - 50;

    double ymax = 1.0;
    for (const ScoreTuple& t : diag.series) {
        ymax = std::max({ymax, t.ka_zero, t.ka_star_eps, t.ka_tilde_eps,
                         t.sensitivity_eps});
    }
    ymax *= 1.05;

    const auto xpos = [&](std::size_t rank) {
        if (n == 1) return (left + right) / 2.0;
        return left + (right - left) * static_cast<double>(rank) /
                          static_cast<double>(n - 1);
    };
    const auto ypos = [&](double v) { return bottom - (bottom - top) * v / ymax; };

    struct SeriesDef {
        const char* name;
        const char* color;
        double ScoreTuple::*field;
    };
    const SeriesDef defs[] = {
        {"technical (0-DF)", "#1f77b4", &ScoreTuple::ka_zero},
        {"best technical", "#d62728", &ScoreTuple::ka_star_eps},
        {"lowest", "#2ca02c", &ScoreTuple::ka_tilde_eps},
        {"sensitivity", "#9467bd", &ScoreTuple::sensitivity_eps},
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";

    // Axes with five horizontal gridlines.
    for (int g = 0; g <= 4; ++g) {
        const double v = ymax * g / 4.0;
        const double y = ypos(v);
        out << "<line x1=\"" << svg_num(left) << "\" y1=\"" << svg_num(y) << "\" x2=\""
            << svg_num(right) << "\" y2=\"" << svg_num(y)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << svg_num(left - 8) << "\" y=\"" << svg_num(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
            << format_double(round_significant(v, 3)) << "</text>\n";
    }
    out << "<line x1=\"" << svg_num(left) << "\" y1=\"" << svg_num(top) << "\" x2=\""
        << svg_num(left) << "\" y2=\"" << svg_num(bottom)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << svg_num(left) << "\" y1=\"" << svg_num(bottom) << "\" x2=\""
        << svg_num(right) << "\" y2=\"" << svg_num(bottom)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << svg_num((left + right) / 2) << "\" y=\""
        << svg_num(height - 12)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
        << "rank by technical score (0-DF)</text>\n";

    for (const SeriesDef& def : defs) {
        out << "<polyline fill=\"none\" stroke=\"" << def.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t rank = 0; rank < n; ++rank) {
            const ScoreTuple& t = diag.series[diag.order[rank]];
            if (rank) out << ' ';
            out << svg_num(xpos(rank)) << ',' << svg_num(ypos(t.*def.field));
        }
        out << "\"/>\n";
    }

    // Legend.
    double ly = top + 10;
    for (const SeriesDef& def : defs) {
        out << "<line x1=\"" << svg_num(right + 16) << "\" y1=\"" << svg_num(ly)
            << "\" x2=\"" << svg_num(right + 44) << "\" y2=\"" << svg_num(ly)
            << "\" stroke=\"" << def.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << svg_num(right + 50) << "\" y=\"" << svg_num(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << def.name
            << "</text>\n";
        ly += 20;
    }
    out << "</svg>\n";
    write_text_file(path, out.str());
}

int run(const RunManifest& manifest) {
    try {
        if (manifest.input_path.has_value() == manifest.generator.has_value())
            throw ConfigError("exactly one of an input path or a generator spec is required");

        std::optional<Sample> sample;
        if (manifest.input_path) {
            sample = read_sample_csv(*manifest.input_path);
        } else {
            sample = generate(*manifest.generator).sample;
        }

        std::error_code ec;
        std::filesystem::create_directories(manifest.out_dir, ec);
        if (ec)
            throw IoError("cannot create output directory '" + manifest.out_dir +
                          "': " + ec.message());
        const auto out_path = [&](const char* name) {
            return (std::filesystem::path(manifest.out_dir) / name).string();
        };

        if (manifest.generator) write_sample_csv(*sample, out_path("sample.csv"));

        OutlierReport report =
            detect(*sample, manifest.config, manifest.thresholds, manifest.second_pass,
                   manifest.with_nonlinear);

        if (manifest.export_report) write_report_json(report, out_path("report.json"));
        if (manifest.export_series)
            export_polygon_chart(report.diagnostics, report.ids, out_path("series.csv"),
                                 "csv");
        if (manifest.export_chart)
            export_polygon_chart(report.diagnostics, report.ids, out_path("chart.svg"),
                                 "svg");
        return 0;
    } catch (const Error& e) {
        const char* label = "";
        switch (e.category()) {
            case ErrorCategory::parse: label = "parse error: "; break;
            case ErrorCategory::config: label = "config error: "; break;
            case ErrorCategory::solver: label = "solver error: "; break;
            case ErrorCategory::io: label = "io error: "; break;
        }
        std::cerr << label << e.what() << "\n";
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace kam
