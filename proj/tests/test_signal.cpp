#include <doctest.h>

#include <cmath>
#include <sstream>

#include "difflms/error.hpp"
#include "difflms/signal.hpp"

using namespace difflms;
using doctest::Approx;

namespace {

double empirical_var(const std::vector<Complex>& v) {
    Complex mean = 0.0;
    for (auto z : v) mean += z;
    mean /= static_cast<double>(v.size());
    double s = 0.0;
    for (auto z : v) s += std::norm(z - mean);
    return s / static_cast<double>(v.size());
}

VarianceProfiles single(double sx, double sv) { return {{{sx}}, {{sv}}}; }

}  // namespace

TEST_CASE("random parameter has unit norm and is reproducible") {
    const auto one = random_parameter(1, 5);
    CHECK(std::abs(one.entries[0]) == Approx(1.0).epsilon(1e-12));
    for (std::size_t m : {1u, 5u, 16u}) {
        const auto a = random_parameter(m, 42);
        const auto b = random_parameter(m, 42);
        CHECK(a.size() == m);
        CHECK(a.entries == b.entries);
        CHECK(std::abs(a.entries.norm() - 1.0) <= 1e-12);
    }
    CHECK(random_parameter(5, 1).entries != random_parameter(5, 2).entries);
}

TEST_CASE("noiseless samples reconstruct exactly") {
    const auto w = random_parameter(5, 3);
    const auto p = single(1.3, 0.0);
    RngStream stream(9);
    for (int i = 0; i < 1000; ++i) {
        const Sample s = draw_sample(0, w, p.input, p.noise, stream);
        CHECK(std::abs(s.observation - w.entries.dot(s.regressor)) == 0.0);
    }
}

TEST_CASE("zero parameter gives pure noise of the stated variance") {
    ParameterVector w{CVector::Zero(3)};
    const auto p = single(1.0, 1.0);
    RngStream stream(17);
    std::vector<Complex> d;
    for (int i = 0; i < 100000; ++i) d.push_back(draw_sample(0, w, p.input, p.noise, stream).observation);
    CHECK(empirical_var(d) == Approx(1.0).epsilon(0.05));
}

TEST_CASE("observation variance is s2_x ||w||^2 + s2_v") {
    // Independent Monte Carlo check of var(d) = 2 * 1 + 0.1.
    const auto w = random_parameter(4, 8);
    const auto p = single(2.0, 0.1);
    RngStream stream(23);
    std::vector<Complex> d;
    for (int i = 0; i < 100000; ++i) d.push_back(draw_sample(0, w, p.input, p.noise, stream).observation);
    CHECK(empirical_var(d) == Approx(2.1).epsilon(0.05));
}

TEST_CASE("regressors are white and circular") {
    const std::size_t m = 4;
    const double sx = 1.7;
    const auto w = random_parameter(m, 1);
    const auto p = single(sx, 0.01);
    RngStream stream(31);
    Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(m, m);
    Eigen::MatrixXcd pseudo = Eigen::MatrixXcd::Zero(m, m);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Sample s = draw_sample(0, w, p.input, p.noise, stream);
        cov += s.regressor * s.regressor.adjoint();
        pseudo += s.regressor * s.regressor.transpose();
    }
    cov /= draws;
    pseudo /= draws;
    const Eigen::MatrixXcd expected = sx * Eigen::MatrixXcd::Identity(m, m);
    CHECK((cov - expected).cwiseAbs().maxCoeff() < 0.05 * sx);
    CHECK(pseudo.cwiseAbs().maxCoeff() < 0.05 * sx);
}

TEST_CASE("real signal mode") {
    const auto w = random_parameter(3, 4);
    const auto p = single(1.0, 0.1);
    RngStream stream(2);
    const Sample s = draw_sample(0, w, p.input, p.noise, stream, SignalType::Real);
    for (Eigen::Index i = 0; i < s.regressor.size(); ++i) CHECK(s.regressor[i].imag() == 0.0);
    CHECK(parse_signal_type("real") == SignalType::Real);
    CHECK_THROWS_AS(parse_signal_type("quaternion"), ParseError);
}

TEST_CASE("node streams are independent of query order") {
    const auto w = random_parameter(5, 6);
    const auto p = variance_profiles(3, VarianceMode::Varying, 4);
    auto run = [&](std::vector<NodeIndex> order) {
        std::vector<RngStream> streams;
        for (NodeIndex k = 0; k < 3; ++k) streams.emplace_back(derive_seed(77, {1, k}));
        std::vector<std::vector<Complex>> seen(3);
        for (int i = 0; i < 50; ++i)
            for (NodeIndex k : order) seen[k].push_back(draw_sample(k, w, p.input, p.noise, streams[k]).observation);
        return seen;
    };
    CHECK(run({0, 1, 2}) == run({2, 0, 1}));
    CHECK(derive_seed(77, {1, 0}) != derive_seed(77, {1, 1}));
    CHECK(derive_seed(77, {1, 0}) != derive_seed(78, {1, 0}));
    CHECK(derive_seed(77, {1, 0}) == derive_seed(77, {1, 0}));
}

TEST_CASE("draw_sample rejects a node without a profile") {
    const auto w = random_parameter(2, 1);
    const auto p = single(1.0, 0.1);
    RngStream stream(1);
    CHECK_THROWS_AS(draw_sample(1, w, p.input, p.noise, stream), IndexOutOfRange);
}

TEST_CASE("variance profiles") {
    SUBCASE("equal") {
        const auto p = variance_profiles(20, VarianceMode::Equal, 0);
        REQUIRE(p.input.variances.size() == 20);
        for (std::size_t k = 0; k < 20; ++k) {
            CHECK(p.input.variances[k] == 1.0);
            CHECK(p.noise.variances[k] == 0.01);
        }
    }
    SUBCASE("varying is deterministic and in range") {
        const auto a = variance_profiles(20, VarianceMode::Varying, 3);
        const auto b = variance_profiles(20, VarianceMode::Varying, 3);
        CHECK(a.input.variances == b.input.variances);
        CHECK(a.noise.variances == b.noise.variances);
        const auto one = variance_profiles(1, VarianceMode::Varying, 12);
        for (const auto& p : {a, one}) {
            for (std::size_t k = 0; k < p.input.variances.size(); ++k) {
                CHECK(p.input.variances[k] >= kVaryingInputMin);
                CHECK(p.input.variances[k] <= kVaryingInputMax);
                CHECK(p.noise.variances[k] >= kVaryingNoiseMin);
                CHECK(p.noise.variances[k] <= kVaryingNoiseMax);
            }
        }
    }
    SUBCASE("CSV round trip is exact") {
        const auto a = variance_profiles(7, VarianceMode::Varying, 9);
        std::stringstream io;
        write_profiles_csv(io, a);
        CHECK(io.str().rfind("node,sigma2_x,sigma2_v\n0,", 0) == 0);
        const auto b = read_profiles_csv(io);
        CHECK(a.input.variances == b.input.variances);
        CHECK(a.noise.variances == b.noise.variances);
        std::istringstream bad("node,sigma2_x,sigma2_v\n0,-1,0.1\n");
        CHECK_THROWS_AS(read_profiles_csv(bad), ParseError);
    }
}
