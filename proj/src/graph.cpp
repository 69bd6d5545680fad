#include "locind/graph.hpp"

#include <algorithm>
#include <string>

#include "locind/error.hpp"

namespace locind {

DirectedGraph::DirectedGraph(int dim) : dim_(dim)
{
    if (dim < 0)
        throw Error(Errc::InvalidArgument, "graph dimension must be nonnegative");
    adj_.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0);
}

DirectedGraph DirectedGraph::complete(int dim)
{
    DirectedGraph g(dim);
    std::fill(g.adj_.begin(), g.adj_.end(), 1);
    return g;
}

DirectedGraph DirectedGraph::self_loops(int dim)
{
    DirectedGraph g(dim);
    for (int v = 0; v < dim; ++v)
        g.add_edge(v, v);
    return g;
}

void DirectedGraph::check(int v) const
{
    if (v < 0 || v >= dim_)
        throw Error(Errc::MarkOutOfRange,
                    "vertex " + std::to_string(v) + " not in graph of dimension " + std::to_string(dim_));
}

bool DirectedGraph::has_edge(int from, int to) const
{
    check(from);
    check(to);
    return adj_[static_cast<std::size_t>(from * dim_ + to)] != 0;
}

void DirectedGraph::add_edge(int from, int to)
{
    check(from);
    check(to);
    adj_[static_cast<std::size_t>(from * dim_ + to)] = 1;
}

void DirectedGraph::remove_edge(int from, int to)
{
    check(from);
    check(to);
    adj_[static_cast<std::size_t>(from * dim_ + to)] = 0;
}

std::vector<Edge> DirectedGraph::edges() const
{
    std::vector<Edge> out;
    for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
            if (adj_[static_cast<std::size_t>(j * dim_ + k)])
                out.emplace_back(j, k);
    return out;
}

std::size_t DirectedGraph::edge_count() const
{
    return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), 1));
}

std::vector<int> DirectedGraph::parents(int to) const
{
    check(to);
    std::vector<int> out;
    for (int j = 0; j < dim_; ++j)
        if (adj_[static_cast<std::size_t>(j * dim_ + to)])
            out.push_back(j);
    return out;
}

DirectedGraph DirectedGraph::permuted(const std::vector<int>& perm) const
{
    if (static_cast<int>(perm.size()) != dim_)
        throw Error(Errc::DimensionMismatch, "permutation size differs from graph dimension");
    DirectedGraph out(dim_);
    for (auto [j, k] : edges())
        out.add_edge(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(k)]);
    return out;
}

} // namespace locind
