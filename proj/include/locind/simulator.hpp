#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "locind/error.hpp"
#include "locind/events.hpp"
#include "locind/graph.hpp"
#include "locind/model.hpp"

namespace locind {

struct SimulationConfig {
    double horizon = 2000.0;
    // Events in [-burn_in, 0) are simulated and then dropped.
    double burn_in = 50.0;
    std::uint64_t seed = 0;
    std::size_t max_events = 1'000'000;
    // Optional constant per-mark dominating rates. When set, every mark draws
    // its candidates from a fixed Poisson stream, so runs with the same seed
    // share candidates across specs. Empty means adaptive bounds.
    std::vector<double> dominating_rates;
};

/*!
 * Simulate a (nonlinear) Hawkes process on [0, horizon) by thinning.
 *
 * Every mark has its own random stream. The adaptive dominating rate for mark
 * k is eta^{-1}(baseline_k + excitatory contributions), which only decays until
 * the next accepted event; it is refreshed at each accepted event and after a
 * rejection once 1/beta_min time has passed since it was set.
 *
 * Throws ExplosionGuard when more than max_events events are accepted.
 */
MarkedEventSequence simulate_hawkes(const IntensityModelSpec& spec, const SimulationConfig& config,
                                    Warnings* warnings = nullptr);

struct RandomGraphConfig {
    int dim = 3;
    double edge_prob = 0.2;
    std::uint64_t seed = 0;
    double cross_alpha_magnitude = 0.4;
    double self_alpha = 0.3;
    // Probability that a cross edge is excitatory.
    double sign_prob = 0.5;
    double decay = 0.8;
    double baseline = 0.25;
};

struct SampledModel {
    DirectedGraph graph;
    IntensityModelSpec spec;
};

// All self-loops plus independent cross edges with signed weights.
SampledModel sample_random_graph(const RandomGraphConfig& config);

// One of the six benchmark structures for level/power experiments. Node
// order is the subset of (j, c, h, k) present; h is never observed.
struct BenchmarkStructure {
    std::string name;
    IntensityModelSpec spec;
    std::vector<std::string> labels;
    std::vector<int> observed;
    int j = -1;
    int c = -1; // -1 when the structure has no c node
    int k = -1;
    bool null_holds = true; // j -/-> k | {c, k} is true
};

const std::vector<std::string>& benchmark_structure_names();
// Throws UnknownStructure for names outside {L1, L2, L3, P1, P2, P3}.
BenchmarkStructure build_benchmark_structure(std::string_view name);

struct ObservedRestriction {
    MarkedEventSequence events;
    // original_mark[new_mark]
    std::vector<int> original_mark;
};

// Drop events with unobserved marks and re-index the rest densely in
// ascending order of the original mark.
ObservedRestriction restrict_to_observed(const MarkedEventSequence& seq,
                                         std::vector<int> observed);

} // namespace locind
