#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace difflms {

using NodeIndex = std::size_t;
using Edge = std::pair<NodeIndex, NodeIndex>;

struct Neighborhood {
    NodeIndex node = 0;
    // Sorted ascending, always contains `node`.
    std::vector<NodeIndex> members;
};

// Connected undirected topology. Nodes are 0..N-1 and each neighborhood
// includes the node itself. Immutable after construction.
class Graph {
public:
    // Throws InvalidEdge or NotConnected.
    Graph(std::size_t n_nodes, std::span<const Edge> edges);

    std::size_t size() const noexcept { return members_.size(); }

    // Edges normalized to (min, max), sorted lexicographically.
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    const std::vector<NodeIndex>& members(NodeIndex k) const;
    Neighborhood neighborhood(NodeIndex k) const;

    // |N_k|, counting k itself.
    std::size_t degree(NodeIndex k) const;

    bool adjacent(NodeIndex k, NodeIndex l) const;

private:
    void check_index(NodeIndex k) const;

    std::vector<Edge> edges_;
    std::vector<std::vector<NodeIndex>> members_;
};

Graph build_graph(std::size_t n_nodes, std::span<const Edge> edges);

inline constexpr int kDefaultConnectivityRetries = 1000;

// Nodes uniform in the unit square, edge iff distance <= radius. Placement
// is redrawn from the same stream until the graph is connected.
Graph random_geometric_graph(std::size_t n_nodes, double radius, std::uint64_t rng_seed,
                             int max_attempts = kDefaultConnectivityRetries);

inline Neighborhood neighborhood(const Graph& g, NodeIndex k) { return g.neighborhood(k); }
inline std::size_t degree(const Graph& g, NodeIndex k) { return g.degree(k); }

Graph complete_graph(std::size_t n_nodes);
Graph path_graph(std::size_t n_nodes);

// Edge-list text: first line N, then "k l" per line; '#' starts a comment.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace difflms
