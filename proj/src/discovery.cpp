#include "locind/discovery.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

#include "locind/parallel.hpp"

namespace locind {

int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("LI_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

const char* to_string(TraceAction action)
{
    switch (action) {
    case TraceAction::Removed: return "removed";
    case TraceAction::Kept: return "kept";
    case TraceAction::Failed: return "failed";
    }
    return "kept";
}

DirectedGraph DiscoveryTrace::replay() const
{
    DirectedGraph g = DirectedGraph::complete(dim);
    for (const auto& r : records)
        if (r.action == TraceAction::Removed)
            g.remove_edge(r.j, r.k);
    return g;
}

namespace {

// Calls fn for each size-l subset of items in lexicographic order; stops
// early when fn returns true.
template <typename Fn>
bool for_each_subset(const std::vector<int>& items, int l, Fn&& fn)
{
    const int n = static_cast<int>(items.size());
    if (l > n)
        return false;
    std::vector<int> idx(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    std::vector<int> subset(static_cast<std::size_t>(l));
    while (true) {
        for (int i = 0; i < l; ++i)
            subset[static_cast<std::size_t>(i)] = items[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        if (fn(subset))
            return true;
        int i = l - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - l + i)
            --i;
        if (i < 0)
            return false;
        ++idx[static_cast<std::size_t>(i)];
        for (int m = i + 1; m < l; ++m)
            idx[static_cast<std::size_t>(m)] = idx[static_cast<std::size_t>(m - 1)] + 1;
    }
}

std::vector<int> candidate_parents(const DirectedGraph& g, int j, int k)
{
    std::vector<int> out;
    for (int p : g.parents(k))
        if (p != j && p != k)
            out.push_back(p);
    return out;
}

} // namespace

DiscoveryResult learn_graph_ca(const MarkedEventSequence& seq, const CAConfig& config)
{
    const int d = seq.dim();
    if (d < 2)
        throw Error(Errc::InvalidArgument, "structure learning needs at least two marks");
    if (!(config.alpha > 0 && config.alpha < 1))
        throw Error(Errc::InvalidArgument, "significance level must lie in (0, 1)");
    config.test.validate();
    const int max_level = config.max_conditioning < 0 ? d - 2 : config.max_conditioning;

    const FeatureCache cache(seq, config.test.basis(), config.test.grid_step);
    DirectedGraph graph = DirectedGraph::complete(d);
    DiscoveryResult result;
    result.trace.dim = d;

    for (int level = 0; level <= max_level; ++level) {
        // Edges into k only depend on the parents of k.
        std::vector<char> has_candidates(static_cast<std::size_t>(d), 0);
        std::vector<std::map<int, std::vector<TraceRecord>>> per_target(static_cast<std::size_t>(d));
        std::vector<std::vector<int>> removed(static_cast<std::size_t>(d));

        parallel_for(static_cast<std::size_t>(d), config.threads, [&](std::size_t ks) {
            const int k = static_cast<int>(ks);
            DirectedGraph local = graph;
            for (int j = 0; j < d; ++j) {
                if (j == k || !local.has_edge(j, k))
                    continue;
                const auto cands = candidate_parents(local, j, k);
                if (static_cast<int>(cands.size()) < level)
                    continue;
                has_candidates[ks] = 1;
                auto& records = per_target[ks][j];
                for_each_subset(cands, level, [&](const std::vector<int>& cond) {
                    TraceRecord rec{level, j, k, cond, 1.0, TraceAction::Kept, {}};
                    try {
                        const LITestResult res = test_local_independence(seq, j, k, cond, config.test, &cache);
                        rec.p_value = res.p_value();
                        if (res.mark_missing)
                            rec.note = "mark missing";
                        if (res.fit && !res.fit->convergence.converged)
                            rec.note = "fit not converged";
                        if (rec.p_value >= config.alpha)
                            rec.action = TraceAction::Removed;
                    } catch (const Error& e) {
                        rec.action = TraceAction::Failed;
                        rec.note = e.what();
                    }
                    records.push_back(rec);
                    if (rec.action == TraceAction::Removed) {
                        local.remove_edge(j, k);
                        removed[ks].push_back(j);
                        return true;
                    }
                    return false;
                });
            }
        });

        // Merge in the sequential scan order: j outer, k inner.
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                auto it = per_target[static_cast<std::size_t>(k)].find(j);
                if (it == per_target[static_cast<std::size_t>(k)].end())
                    continue;
                for (auto& rec : it->second)
                    result.trace.records.push_back(std::move(rec));
            }
        for (int k = 0; k < d; ++k)
            for (int j : removed[static_cast<std::size_t>(k)])
                graph.remove_edge(j, k);

        if (std::none_of(has_candidates.begin(), has_candidates.end(), [](char b) { return b != 0; }))
            break;
    }
    result.graph = graph;
    return result;
}

int shd(const DirectedGraph& a, const DirectedGraph& b)
{
    if (a.dim() != b.dim())
        throw Error(Errc::DimensionMismatch, "graphs have different dimensions");
    int total = 0;
    for (int j = 0; j < a.dim(); ++j) {
        for (int k = j + 1; k < a.dim(); ++k) {
            const bool a_fwd = a.has_edge(j, k), a_bwd = a.has_edge(k, j);
            const bool b_fwd = b.has_edge(j, k), b_bwd = b.has_edge(k, j);
            const bool flipped = a_fwd != a_bwd && a_fwd == b_bwd && a_bwd == b_fwd;
            total += flipped ? 1 : static_cast<int>(a_fwd != b_fwd) + static_cast<int>(a_bwd != b_bwd);
        }
    }
    return total;
}

} // namespace locind
