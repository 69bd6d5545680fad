#pragma once

#include <string>
#include <vector>

#include "locind/events.hpp"
#include "locind/graph.hpp"
#include "locind/litest.hpp"

namespace locind {

struct CAConfig {
    LITestConfig test;
    double alpha = 0.05;
    // Largest conditioning set size; negative means d - 2.
    int max_conditioning = -1;
    int threads = 1;
};

enum class TraceAction { Removed, Kept, Failed };

const char* to_string(TraceAction action);

struct TraceRecord {
    int level = 0;
    int j = 0;
    int k = 0;
    std::vector<int> conditioning;
    double p_value = 1.0;
    TraceAction action = TraceAction::Kept;
    std::string note;
};

struct DiscoveryTrace {
    int dim = 0;
    std::vector<TraceRecord> records;

    // Complete graph with every Removed record applied in order.
    DirectedGraph replay() const;
};

struct DiscoveryResult {
    DirectedGraph graph;
    DiscoveryTrace trace;
};

/*!
 * Constraint-based structure learning over local independence tests.
 *
 * Starts from the complete graph with self-loops, which are never tested. For
 * l = 0, 1, ... each remaining edge j -> k (lexicographic) is tested against
 * every size-l subset C of the current parents of k other than j and k, in
 * lexicographic order; the edge is removed at the first p >= alpha. Stops
 * when no edge has l candidate parents or l exceeds max_conditioning.
 * Removing j -> k only changes the parents of k, so targets are processed
 * in parallel with results identical to the sequential scan.
 */
DiscoveryResult learn_graph_ca(const MarkedEventSequence& seq, const CAConfig& config);

// Structural Hamming distance ignoring self-loops. Per unordered pair, a
// one-directional edge reversed counts 1 (flip); otherwise each differing
// ordered pair counts 1. Throws DimensionMismatch for different dimensions.
int shd(const DirectedGraph& a, const DirectedGraph& b);

} // namespace locind
