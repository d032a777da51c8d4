#include "difflms/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "difflms/error.hpp"

namespace difflms {

namespace {

bool reaches_all(const std::vector<std::vector<NodeIndex>>& members) {
    if (members.empty()) return true;
    std::vector<bool> seen(members.size(), false);
    std::queue<NodeIndex> frontier;
    seen[0] = true;
    frontier.push(0);
    std::size_t count = 1;
    while (!frontier.empty()) {
        const NodeIndex u = frontier.front();
        frontier.pop();
        for (NodeIndex v : members[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                frontier.push(v);
            }
        }
    }
    return count == members.size();
}

}  // namespace

Graph::Graph(std::size_t n_nodes, std::span<const Edge> edges) {
    if (n_nodes == 0) throw InvalidEdge("graph needs at least one node");

    std::set<Edge> unique;
    for (auto [a, b] : edges) {
        if (a >= n_nodes || b >= n_nodes) {
            throw InvalidEdge("edge {" + std::to_string(a) + "," + std::to_string(b) +
                              "} has an index outside [0, " + std::to_string(n_nodes) + ")");
        }
        if (a == b) throw InvalidEdge("self-loop on node " + std::to_string(a));
        const Edge e{std::min(a, b), std::max(a, b)};
        if (!unique.insert(e).second) {
            throw InvalidEdge("duplicate edge {" + std::to_string(e.first) + "," +
                              std::to_string(e.second) + "}");
        }
    }
    edges_.assign(unique.begin(), unique.end());

    members_.resize(n_nodes);
    for (NodeIndex k = 0; k < n_nodes; ++k) members_[k].push_back(k);
    for (auto [a, b] : edges_) {
        members_[a].push_back(b);
        members_[b].push_back(a);
    }
    for (auto& m : members_) std::sort(m.begin(), m.end());

    if (!reaches_all(members_)) throw NotConnected("graph is not connected");
}

void Graph::check_index(NodeIndex k) const {
    if (k >= size()) {
        throw IndexOutOfRange("node " + std::to_string(k) + " out of range for graph of " +
                              std::to_string(size()) + " nodes");
    }
}

const std::vector<NodeIndex>& Graph::members(NodeIndex k) const {
    check_index(k);
    return members_[k];
}

Neighborhood Graph::neighborhood(NodeIndex k) const { return {k, members(k)}; }

std::size_t Graph::degree(NodeIndex k) const { return members(k).size(); }

bool Graph::adjacent(NodeIndex k, NodeIndex l) const {
    const auto& m = members(k);
    return std::binary_search(m.begin(), m.end(), l);
}

Graph build_graph(std::size_t n_nodes, std::span<const Edge> edges) { return Graph(n_nodes, edges); }

Graph random_geometric_graph(std::size_t n_nodes, double radius, std::uint64_t rng_seed,
                             int max_attempts) {
    if (n_nodes == 0) throw InvalidEdge("graph needs at least one node");
    std::mt19937_64 engine(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r2 = radius * radius;

    std::vector<double> xs(n_nodes), ys(n_nodes);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        for (std::size_t k = 0; k < n_nodes; ++k) {
            xs[k] = unit(engine);
            ys[k] = unit(engine);
        }
        std::vector<Edge> edges;
        for (std::size_t k = 0; k < n_nodes; ++k) {
            for (std::size_t l = k + 1; l < n_nodes; ++l) {
                const double dx = xs[k] - xs[l];
                const double dy = ys[k] - ys[l];
                if (dx * dx + dy * dy <= r2) edges.emplace_back(k, l);
            }
        }
        try {
            return Graph(n_nodes, edges);
        } catch (const NotConnected&) {
        }
    }
    throw ConnectivityRetriesExhausted("no connected placement after " +
                                       std::to_string(max_attempts) + " attempts");
}

Graph complete_graph(std::size_t n_nodes) {
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < n_nodes; ++k)
        for (std::size_t l = k + 1; l < n_nodes; ++l) edges.emplace_back(k, l);
    return Graph(n_nodes, edges);
}

Graph path_graph(std::size_t n_nodes) {
    std::vector<Edge> edges;
    for (std::size_t k = 0; k + 1 < n_nodes; ++k) edges.emplace_back(k, k + 1);
    return Graph(n_nodes, edges);
}

Graph read_edge_list(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    long long n_nodes = -1;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<long long> values;
        long long v = 0;
        while (fields >> v) values.push_back(v);
        if (!fields.eof()) {
            throw ParseError("edge list line " + std::to_string(line_no) + ": expected integers");
        }
        if (values.empty()) continue;
        if (n_nodes < 0) {
            if (values.size() != 1 || values[0] <= 0) {
                throw ParseError("edge list line " + std::to_string(line_no) +
                                 ": expected a positive node count");
            }
            n_nodes = values[0];
            continue;
        }
        if (values.size() != 2 || values[0] < 0 || values[1] < 0) {
            throw ParseError("edge list line " + std::to_string(line_no) +
                             ": expected two non-negative node indices");
        }
        edges.emplace_back(static_cast<NodeIndex>(values[0]), static_cast<NodeIndex>(values[1]));
    }
    if (n_nodes < 0) throw ParseError("edge list is missing the node count");
    return Graph(static_cast<std::size_t>(n_nodes), edges);
}

Graph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open edge list '" + path + "'");
    return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << g.size() << '\n';
    for (auto [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

}  // namespace difflms
