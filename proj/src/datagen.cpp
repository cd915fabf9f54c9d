#include "kam/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace kam {

namespace {

// Portable draws on top of the standard-pinned mt19937_64 sequence.
// std::uniform_real_distribution is implementation-defined, so the
// transforms are spelled out here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {  // [0, 1) with 53-bit resolution
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

private:
    std::mt19937_64 gen_;
};

std::string padded_id(char prefix, std::size_t index, std::size_t count) {
    std::size_t width = 1;
    for (std::size_t c = count; c >= 10; c /= 10) ++width;
    std::string digits = std::to_string(index + 1);
    return prefix + std::string(width > digits.size() ? width - digits.size() : 0, '0') +
           digits;
}

}  // namespace

LabeledSample generate(const ScenarioSpec& spec) {
    if (!(spec.frontier_scale > 0.0)) throw ConfigError("frontier scale must be > 0");
    if (!(spec.frontier_exponent > 0.0 && spec.frontier_exponent <= 1.0))
        throw ConfigError("frontier exponent must be in (0, 1]");
    if (!(spec.x_low > 0.0 && spec.x_high > spec.x_low))
        throw ConfigError("x range must satisfy 0 < low < high");
    if (!(spec.inefficiency_rate > 0.0))
        throw ConfigError("inefficiency rate must be > 0");
    if (!(spec.spike_lift > 1.0)) throw ConfigError("spike lift must be > 1");
    if (spec.n_clean + spec.n_spikes + spec.n_nfd == 0)
        throw ConfigError("scenario produces an empty sample");
    if (spec.n_nfd > 0 && spec.n_clean == 0)
        throw ConfigError("near-and-far points need a clean reference point");

    const auto frontier = [&](double x) {
        return spec.frontier_scale * std::pow(x, spec.frontier_exponent);
    };

    Rng rng(spec.seed);
    std::vector<Dmu> dmus;
    std::vector<DmuLabel> labels;
    dmus.reserve(spec.n_clean + spec.n_spikes + spec.n_nfd);

    double best_clean_output = 0.0;
    for (std::size_t i = 0; i < spec.n_clean; ++i) {
        const double x = rng.uniform(spec.x_low, spec.x_high);
        const double u = rng.exponential(spec.inefficiency_rate);
        const double y = frontier(x) * std::exp(-u);
        dmus.push_back({padded_id('C', i, spec.n_clean), {x}, {y}});
        labels.push_back(DmuLabel::clean);
        best_clean_output = std::max(best_clean_output, y);
    }

    for (std::size_t i = 0; i < spec.n_spikes; ++i) {
        const double x = rng.uniform(spec.x_low, spec.x_high);
        const double y = frontier(x) * spec.spike_lift;
        dmus.push_back({padded_id('S', i, spec.n_spikes), {x}, {y}});
        labels.push_back(DmuLabel::spike);
    }

    if (spec.n_nfd > 0) {
        // High-input points whose outputs form a staircase just above the
        // best clean output, so no NFD dominates another.
        std::vector<double> xs(spec.n_nfd);
        for (double& x : xs) x = rng.uniform(0.8 * spec.x_high, spec.x_high);
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i < spec.n_nfd; ++i) {
            const double lift =
                0.05 * static_cast<double>(i + 1) / static_cast<double>(spec.n_nfd);
            const double y = best_clean_output * (1.0 + lift);
            dmus.push_back({padded_id('N', i, spec.n_nfd), {xs[i]}, {y}});
            labels.push_back(DmuLabel::nfd);
        }
    }

    for (const Dmu& d : dmus)
        if (!(d.inputs[0] > 0.0) || !(d.outputs[0] > 0.0))
            throw ConfigError("scenario produced a nonpositive coordinate for '" +
                              d.id + "'");

    return {Sample(std::move(dmus)), std::move(labels)};
}

}  // namespace kam
