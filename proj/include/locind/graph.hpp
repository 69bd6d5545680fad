#pragma once

#include <utility>
#include <vector>

namespace locind {

using Edge = std::pair<int, int>; // (from, to)

// Directed graph on {0..d-1}; self-loops are ordinary edges.
class DirectedGraph {
  public:
    DirectedGraph() = default;
    explicit DirectedGraph(int dim);

    static DirectedGraph complete(int dim);
    static DirectedGraph self_loops(int dim);

    int dim() const { return dim_; }

    bool has_edge(int from, int to) const;
    void add_edge(int from, int to);
    void remove_edge(int from, int to);

    // Edges in lexicographic (from, to) order.
    std::vector<Edge> edges() const;
    std::size_t edge_count() const;

    // Sorted parents of a vertex (including itself when it has a self-loop).
    std::vector<int> parents(int to) const;

    DirectedGraph permuted(const std::vector<int>& perm) const;

    bool operator==(const DirectedGraph&) const = default;

  private:
    void check(int v) const;

    int dim_ = 0;
    std::vector<char> adj_;
};

} // namespace locind
