#pragma once

// Deterministic synthetic samples: a smooth power frontier y = a * x^b with
// exponentially shrunk outputs for the clean mass, measurement-error spikes
// lifted above the frontier, and near-and-far points (high input, output
// barely above the best clean output).
//
// The generator is part of the fixture contract: std::mt19937_64 with
// explicit transforms (53-bit uniforms, inverse-CDF exponentials), so the
// same spec reproduces the same bytes on every platform. Do not change the
// draw order or the transforms without regenerating the golden files.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kam/types.hpp"

namespace kam {

struct ScenarioSpec {
    std::uint64_t seed = 42;
    std::size_t n_clean = 82;
    double frontier_scale = 5.0;      // a > 0
    double frontier_exponent = 0.10;  // b in (0, 1]
    double x_low = 1.0;               // > 0
    double x_high = 10.0;
    double inefficiency_rate = 0.85;  // exponential rate of output shrinkage
    std::size_t n_spikes = 10;
    std::size_t n_nfd = 8;
    double spike_lift = 1.02;         // > 1, multiplies the frontier value
};

enum class DmuLabel { clean, spike, nfd };

struct LabeledSample {
    Sample sample;
    std::vector<DmuLabel> labels;  // aligned with sample order
};

// Sample order is cleans, then spikes, then NFDs, with ids C###, S##, N##.
// Throws ConfigError on an invalid spec or if it would produce a
// nonpositive coordinate.
LabeledSample generate(const ScenarioSpec& spec);

}  // namespace kam
