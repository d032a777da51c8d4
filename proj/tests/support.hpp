#pragma once

// Shared helpers for the unit and acceptance suites.

#include <algorithm>
#include <complex>
#include <cstring>
#include <cstdint>
#include <random>
#include <unistd.h>
#include <vector>

#include "difflms/algorithms.hpp"
#include "difflms/graph.hpp"
#include "difflms/signal.hpp"

namespace difflms::testing {

// Random connected graph: a random spanning tree plus each remaining pair
// with probability `extra`.
inline Graph random_connected_graph(std::size_t n, std::mt19937_64& rng, double extra = 0.3) {
    std::vector<Edge> edges;
    std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t parent = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
        edges.emplace_back(parent, k);
        used[parent][k] = used[k][parent] = true;
    }
    std::bernoulli_distribution coin(extra);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l)
            if (!used[k][l] && coin(rng)) edges.emplace_back(k, l);
    std::shuffle(edges.begin(), edges.end(), rng);
    return Graph(n, edges);
}

// Regressors and observations from a private generator, independent of the
// library's sampling path.
inline std::vector<Sample> random_samples(std::size_t n, std::size_t m, std::mt19937_64& rng,
                                          double noise = 0.1) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Sample> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k].node = k;
        out[k].regressor.resize(static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < m; ++j) out[k].regressor[static_cast<Eigen::Index>(j)] = {g(rng), g(rng)};
        out[k].observation = {g(rng) + noise * g(rng), g(rng)};
    }
    return out;
}

inline NetworkState random_states(std::size_t n, std::size_t m, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    NetworkState s(n, NodeState::zeros(m));
    for (auto& node : s)
        for (Eigen::Index j = 0; j < node.omega.size(); ++j) node.omega[j] = {g(rng), g(rng)};
    return s;
}

inline bool bitwise_equal(const CVector& a, const CVector& b) {
    if (a.size() != b.size()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::memcmp(&a[i], &b[i], sizeof(Complex)) != 0) return false;
    }
    return true;
}

inline double rel_error(const CVector& got, const CVector& want) {
    return (got - want).norm() / std::max(1.0, want.norm());
}

}  // namespace difflms::testing

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace difflms::testing {

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("difflms_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace difflms::testing
