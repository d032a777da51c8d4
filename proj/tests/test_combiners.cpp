#include <doctest.h>

#include <random>
#include <sstream>

#include "difflms/combiners.hpp"
#include "difflms/error.hpp"
#include "support.hpp"

using namespace difflms;
using doctest::Approx;

namespace {

Graph star4() {
    const std::vector<Edge> edges{{0, 1}, {0, 2}, {0, 3}};
    return Graph(4, edges);
}

}  // namespace

TEST_CASE("metropolis on the path graph") {
    const auto m = metropolis(path_graph(3));
    CHECK(m(0, 1) == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m(0, 0) == Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(m(0, 2) == 0.0);
    CHECK(m(1, 0) == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m(1, 2) == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m(1, 1) == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m.rule == CombinerRule::Metropolis);
}

TEST_CASE("metropolis on K3 is uniform") {
    const auto m = metropolis(complete_graph(3));
    for (NodeIndex k = 0; k < 3; ++k)
        for (NodeIndex l = 0; l < 3; ++l) CHECK(m(k, l) == Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("uniform rule") {
    const auto p = uniform(path_graph(3));
    for (NodeIndex l = 0; l < 3; ++l) CHECK(p(1, l) == Approx(1.0 / 3.0).epsilon(1e-15));
    const auto s = uniform(star4());
    for (NodeIndex l = 0; l < 4; ++l) CHECK(s(0, l) == 0.25);
    CHECK(s(1, 0) == 0.5);
    CHECK(s(1, 2) == 0.0);
}

TEST_CASE("relative degree rule") {
    const auto p = relative_degree(path_graph(3));
    CHECK(p(0, 0) == Approx(2.0 / 5.0).epsilon(1e-15));
    CHECK(p(0, 1) == Approx(3.0 / 5.0).epsilon(1e-15));
    CHECK(p(0, 2) == 0.0);
    const auto k3 = relative_degree(complete_graph(3));
    for (NodeIndex k = 0; k < 3; ++k)
        for (NodeIndex l = 0; l < 3; ++l) CHECK(k3(k, l) == Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("laplacian rule") {
    const auto p = laplacian(path_graph(3));
    const double want[3][3] = {{0.5, 0.5, 0.0}, {0.5, 0.0, 0.5}, {0.0, 0.5, 0.5}};
    for (NodeIndex k = 0; k < 3; ++k)
        for (NodeIndex l = 0; l < 3; ++l) CHECK(p(k, l) == Approx(want[k][l]).epsilon(1e-15));
    const auto k2 = laplacian(complete_graph(2));
    CHECK(k2(0, 0) == 0.0);
    CHECK(k2(0, 1) == 1.0);
    CHECK(k2(1, 0) == 1.0);
    CHECK(k2(1, 1) == 0.0);
    CHECK_THROWS_AS(laplacian(path_graph(3), 0.0), InvalidMatrix);
    CHECK_THROWS_AS(laplacian(path_graph(3), 1.5), InvalidMatrix);
}

TEST_CASE("identity") {
    CHECK(identity(1).weights(0, 0) == 1.0);
    CHECK(identity(3).weights.isIdentity());
}

TEST_CASE("every rule on a single node is [[1]]") {
    const Graph g = build_graph(1, {});
    for (auto rule : {CombinerRule::Metropolis, CombinerRule::Uniform, CombinerRule::RelativeDegree,
                      CombinerRule::Laplacian, CombinerRule::Identity}) {
        const auto m = make_combiner(rule, g);
        REQUIRE(m.size() == 1);
        CHECK(m(0, 0) == 1.0);
    }
}

TEST_CASE("validate reports the first violation") {
    const Graph g = path_graph(3);
    CHECK_FALSE(validate(metropolis(g), g).has_value());

    SUBCASE("support") {
        CombinationMatrix m = identity(3);
        m.weights(0, 0) = 0.5;
        m.weights(0, 2) = 0.5;
        const auto v = validate(m, g);
        REQUIRE(v);
        CHECK(v->kind == Violation::Kind::Support);
        CHECK(v->row == 0);
        CHECK(v->col == 2);
        CHECK(v->describe() == "SupportViolation(0, 2)");
    }
    SUBCASE("row sum") {
        CombinationMatrix m = identity(3);
        m.weights(1, 1) = 0.9;
        const auto v = validate(m, g);
        REQUIRE(v);
        CHECK(v->kind == Violation::Kind::RowSum);
        CHECK(v->row == 1);
        CHECK(v->value == Approx(0.9));
    }
    SUBCASE("negative") {
        CombinationMatrix m = identity(3);
        m.weights(2, 1) = -0.5;
        m.weights(2, 2) = 1.5;
        const auto v = validate(m, g);
        REQUIRE(v);
        CHECK(v->kind == Violation::Kind::Negative);
    }
    SUBCASE("dimension") {
        const auto v = validate(identity(2), g);
        REQUIRE(v);
        CHECK(v->kind == Violation::Kind::Dimension);
    }
}

TEST_CASE("all rules are valid on random connected graphs up to 25 nodes") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 25;
        const Graph g = testing::random_connected_graph(n, rng, 0.2);
        for (auto rule : {CombinerRule::Metropolis, CombinerRule::Uniform, CombinerRule::RelativeDegree,
                          CombinerRule::Laplacian, CombinerRule::Identity}) {
            const auto m = make_combiner(rule, g);
            CHECK_FALSE(validate(m, g).has_value());
        }
        const auto metro = metropolis(g);
        CHECK_FALSE(check_doubly_stochastic(metro).has_value());
        CHECK((metro.weights - metro.weights.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const auto lap = laplacian(g, 0.5);
        CHECK_FALSE(validate(lap, g).has_value());
        CHECK((lap.weights - lap.weights.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("rules on K_N are invariant under relabelling") {
    for (std::size_t n : {2u, 4u, 7u}) {
        const Graph g = complete_graph(n);
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(static_cast<Eigen::Index>(n));
        perm.setIdentity();
        std::mt19937 rng(static_cast<unsigned>(n));
        std::shuffle(perm.indices().data(), perm.indices().data() + n, rng);
        for (auto rule : {CombinerRule::Metropolis, CombinerRule::Uniform, CombinerRule::RelativeDegree,
                          CombinerRule::Laplacian}) {
            const Eigen::MatrixXd w = make_combiner(rule, g).weights;
            const Eigen::MatrixXd relabelled = perm * w * perm.transpose();
            CHECK((relabelled - w).cwiseAbs().maxCoeff() < 1e-15);
        }
    }
}

TEST_CASE("rule names round trip and CSV export") {
    for (auto rule : {CombinerRule::Metropolis, CombinerRule::Uniform, CombinerRule::RelativeDegree,
                      CombinerRule::Laplacian, CombinerRule::Identity})
        CHECK(parse_rule(rule_name(rule)) == rule);
    CHECK_THROWS_AS(parse_rule("maximum"), ParseError);

    std::ostringstream out;
    write_matrix_csv(out, metropolis(path_graph(3)));
    CHECK(out.str() ==
          "0.66666666666666674,0.33333333333333331,0\n"
          "0.33333333333333331,0.33333333333333337,0.33333333333333331\n"
          "0,0.33333333333333331,0.66666666666666674\n");
}
