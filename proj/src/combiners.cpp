#include "difflms/combiners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "difflms/error.hpp"

namespace difflms {

namespace {

constexpr std::pair<CombinerRule, std::string_view> kRuleNames[] = {
    {CombinerRule::Metropolis, "metropolis"},
    {CombinerRule::Uniform, "uniform"},
    {CombinerRule::RelativeDegree, "relative_degree"},
    {CombinerRule::Laplacian, "laplacian"},
    {CombinerRule::Identity, "identity"},
};

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

std::string_view rule_name(CombinerRule rule) noexcept {
    for (auto [r, name] : kRuleNames)
        if (r == rule) return name;
    return "unknown";
}

CombinerRule parse_rule(std::string_view name) {
    for (auto [r, n] : kRuleNames)
        if (n == name) return r;
    throw ParseError("unknown combiner rule '" + std::string(name) + "' (valid: " +
                     valid_rule_names() + ")");
}

std::string valid_rule_names() {
    std::string out;
    for (auto [r, n] : kRuleNames) {
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

CombinationMatrix metropolis(const Graph& g) {
    const std::size_t n = g.size();
    CombinationMatrix m{Eigen::MatrixXd::Zero(idx(n), idx(n)), CombinerRule::Metropolis};
    for (NodeIndex k = 0; k < n; ++k) {
        double off = 0.0;
        for (NodeIndex l : g.members(k)) {
            if (l == k) continue;
            const double w = 1.0 / static_cast<double>(std::max(g.degree(k), g.degree(l)));
            m.weights(idx(k), idx(l)) = w;
            off += w;
        }
        m.weights(idx(k), idx(k)) = 1.0 - off;
    }
    return m;
}

CombinationMatrix uniform(const Graph& g) {
    const std::size_t n = g.size();
    CombinationMatrix m{Eigen::MatrixXd::Zero(idx(n), idx(n)), CombinerRule::Uniform};
    for (NodeIndex k = 0; k < n; ++k) {
        const double w = 1.0 / static_cast<double>(g.degree(k));
        for (NodeIndex l : g.members(k)) m.weights(idx(k), idx(l)) = w;
    }
    return m;
}

CombinationMatrix relative_degree(const Graph& g) {
    const std::size_t n = g.size();
    CombinationMatrix m{Eigen::MatrixXd::Zero(idx(n), idx(n)), CombinerRule::RelativeDegree};
    for (NodeIndex k = 0; k < n; ++k) {
        double total = 0.0;
        for (NodeIndex l : g.members(k)) total += static_cast<double>(g.degree(l));
        for (NodeIndex l : g.members(k))
            m.weights(idx(k), idx(l)) = static_cast<double>(g.degree(l)) / total;
    }
    return m;
}

CombinationMatrix laplacian(const Graph& g, double kappa) {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw InvalidMatrix("laplacian kappa must lie in (0, 1]");
    const std::size_t n = g.size();
    CombinationMatrix m{Eigen::MatrixXd::Identity(idx(n), idx(n)), CombinerRule::Laplacian};
    std::size_t d_max = 0;
    for (NodeIndex k = 0; k < n; ++k) d_max = std::max(d_max, g.degree(k) - 1);
    if (d_max == 0) return m;
    const double scale = kappa / static_cast<double>(d_max);
    for (NodeIndex k = 0; k < n; ++k) {
        for (NodeIndex l : g.members(k)) {
            if (l != k) m.weights(idx(k), idx(l)) = scale;
        }
        m.weights(idx(k), idx(k)) = 1.0 - scale * static_cast<double>(g.degree(k) - 1);
    }
    return m;
}

CombinationMatrix identity(std::size_t n) {
    return {Eigen::MatrixXd::Identity(idx(n), idx(n)), CombinerRule::Identity};
}

CombinationMatrix make_combiner(CombinerRule rule, const Graph& g, double kappa) {
    switch (rule) {
        case CombinerRule::Metropolis: return metropolis(g);
        case CombinerRule::Uniform: return uniform(g);
        case CombinerRule::RelativeDegree: return relative_degree(g);
        case CombinerRule::Laplacian: return laplacian(g, kappa);
        case CombinerRule::Identity: return identity(g.size());
    }
    throw InvalidMatrix("unhandled combiner rule");
}

std::string Violation::describe() const {
    char buf[160];
    switch (kind) {
        case Kind::Dimension:
            std::snprintf(buf, sizeof buf, "DimensionViolation(%zu, %zu)", row, col);
            break;
        case Kind::Negative:
            std::snprintf(buf, sizeof buf, "NegativeViolation(%zu, %zu, %.17g)", row, col, value);
            break;
        case Kind::Support:
            std::snprintf(buf, sizeof buf, "SupportViolation(%zu, %zu)", row, col);
            break;
        case Kind::RowSum:
            std::snprintf(buf, sizeof buf, "RowSumViolation(%zu, %.17g)", row, value);
            break;
        case Kind::ColumnSum:
            std::snprintf(buf, sizeof buf, "ColumnSumViolation(%zu, %.17g)", col, value);
            break;
    }
    return buf;
}

std::optional<Violation> validate(const CombinationMatrix& m, const Graph& g) {
    const std::size_t n = g.size();
    if (static_cast<std::size_t>(m.weights.rows()) != n ||
        static_cast<std::size_t>(m.weights.cols()) != n) {
        return Violation{Violation::Kind::Dimension, static_cast<std::size_t>(m.weights.rows()),
                         static_cast<std::size_t>(m.weights.cols()), 0.0};
    }
    for (NodeIndex k = 0; k < n; ++k) {
        double sum = 0.0;
        for (NodeIndex l = 0; l < n; ++l) {
            const double w = m(k, l);
            if (!(w >= 0.0)) return Violation{Violation::Kind::Negative, k, l, w};
            if (w != 0.0 && !g.adjacent(k, l)) return Violation{Violation::Kind::Support, k, l, w};
            sum += w;
        }
        if (std::abs(sum - 1.0) > kStochasticTolerance)
            return Violation{Violation::Kind::RowSum, k, 0, sum};
    }
    return std::nullopt;
}

std::optional<Violation> check_doubly_stochastic(const CombinationMatrix& m) {
    for (Eigen::Index l = 0; l < m.weights.cols(); ++l) {
        const double sum = m.weights.col(l).sum();
        if (std::abs(sum - 1.0) > kStochasticTolerance)
            return Violation{Violation::Kind::ColumnSum, 0, static_cast<std::size_t>(l), sum};
    }
    return std::nullopt;
}

void write_matrix_csv(std::ostream& out, const CombinationMatrix& m) {
    char buf[32];
    for (Eigen::Index k = 0; k < m.weights.rows(); ++k) {
        for (Eigen::Index l = 0; l < m.weights.cols(); ++l) {
            std::snprintf(buf, sizeof buf, "%.17g", m.weights(k, l));
            if (l > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace difflms
