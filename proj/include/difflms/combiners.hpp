#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "difflms/graph.hpp"

namespace difflms {

enum class CombinerRule { Metropolis, Uniform, RelativeDegree, Laplacian, Identity };

std::string_view rule_name(CombinerRule rule) noexcept;
// Accepts the names returned by rule_name(); throws ParseError otherwise.
CombinerRule parse_rule(std::string_view name);
std::string valid_rule_names();

inline constexpr double kStochasticTolerance = 1e-12;

// Entry (k, l) is the weight node k applies to node l's estimate.
struct CombinationMatrix {
    Eigen::MatrixXd weights;
    CombinerRule rule = CombinerRule::Identity;

    std::size_t size() const noexcept { return static_cast<std::size_t>(weights.rows()); }
    double operator()(NodeIndex k, NodeIndex l) const {
        return weights(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
    }
};

CombinationMatrix metropolis(const Graph& g);
CombinationMatrix uniform(const Graph& g);
CombinationMatrix relative_degree(const Graph& g);
// C = I - (kappa / d_max) L, with d_max the largest edge count at any node.
CombinationMatrix laplacian(const Graph& g, double kappa = 1.0);
CombinationMatrix identity(std::size_t n);

CombinationMatrix make_combiner(CombinerRule rule, const Graph& g, double kappa = 1.0);

struct Violation {
    enum class Kind { Dimension, Negative, Support, RowSum, ColumnSum };
    Kind kind;
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;

    std::string describe() const;
};

// First violation found scanning row-major, or nullopt when the matrix is a
// valid row-stochastic combiner on `g`.
std::optional<Violation> validate(const CombinationMatrix& m, const Graph& g);

// Column sums within tolerance (rows are checked by validate()).
std::optional<Violation> check_doubly_stochastic(const CombinationMatrix& m);

// Row-major N x N, 17 significant digits.
void write_matrix_csv(std::ostream& out, const CombinationMatrix& m);

}  // namespace difflms
