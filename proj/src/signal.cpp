#include "difflms/signal.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "difflms/error.hpp"

namespace difflms {

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * path.size());
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master);
    for (auto v : path) push(v);
    std::seed_seq seq(words.begin(), words.end());
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

std::string_view signal_type_name(SignalType t) noexcept {
    return t == SignalType::Complex ? "complex" : "real";
}

SignalType parse_signal_type(std::string_view name) {
    if (name == "complex") return SignalType::Complex;
    if (name == "real") return SignalType::Real;
    throw ParseError("unknown signal type '" + std::string(name) + "' (valid: complex, real)");
}

Complex RngStream::gaussian(double variance, SignalType type) {
    if (type == SignalType::Real) return {std::sqrt(variance) * normal_(engine_), 0.0};
    const double s = std::sqrt(variance / 2.0);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
}

double RngStream::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

ParameterVector random_parameter(std::size_t m, std::uint64_t rng_seed) {
    RngStream stream(rng_seed);
    CVector w(static_cast<Eigen::Index>(m));
    do {
        for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = stream.gaussian(1.0);
    } while (w.norm() == 0.0);
    w /= w.norm();
    return {std::move(w)};
}

Sample draw_sample(NodeIndex node, const ParameterVector& omega0, const InputProfile& input,
                   const NoiseProfile& noise, RngStream& stream, SignalType type) {
    Sample s;
    draw_sample_into(s, node, omega0, input, noise, stream, type);
    return s;
}

void draw_sample_into(Sample& s, NodeIndex node, const ParameterVector& omega0,
                      const InputProfile& input, const NoiseProfile& noise, RngStream& stream,
                      SignalType type) {
    if (node >= input.variances.size() || node >= noise.variances.size()) {
        throw IndexOutOfRange("node " + std::to_string(node) + " has no variance profile entry");
    }
    s.node = node;
    s.regressor.resize(omega0.entries.size());
    for (Eigen::Index i = 0; i < s.regressor.size(); ++i)
        s.regressor[i] = stream.gaussian(input.variances[node], type);
    const Complex n = stream.gaussian(noise.variances[node], type);
    // Eigen's dot conjugates its left operand: omega0^H x.
    s.observation = omega0.entries.dot(s.regressor) + n;
}

std::string_view variance_mode_name(VarianceMode m) noexcept {
    return m == VarianceMode::Equal ? "equal" : "varying";
}

VarianceMode parse_variance_mode(std::string_view name) {
    if (name == "equal") return VarianceMode::Equal;
    if (name == "varying") return VarianceMode::Varying;
    throw ParseError("unknown variance mode '" + std::string(name) + "' (valid: equal, varying)");
}

VarianceProfiles variance_profiles(std::size_t n, VarianceMode mode, std::uint64_t rng_seed) {
    VarianceProfiles p;
    if (mode == VarianceMode::Equal) {
        p.input.variances.assign(n, kEqualInputVariance);
        p.noise.variances.assign(n, kEqualNoiseVariance);
        return p;
    }
    RngStream stream(rng_seed);
    p.input.variances.resize(n);
    p.noise.variances.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        p.input.variances[k] = stream.uniform(kVaryingInputMin, kVaryingInputMax);
        p.noise.variances[k] = stream.uniform(kVaryingNoiseMin, kVaryingNoiseMax);
    }
    return p;
}

void write_profiles_csv(std::ostream& out, const VarianceProfiles& p) {
    out << "node,sigma2_x,sigma2_v\n";
    char buf[96];
    for (std::size_t k = 0; k < p.input.variances.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k, p.input.variances[k],
                      p.noise.variances[k]);
        out << buf;
    }
}

VarianceProfiles read_profiles_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "node,sigma2_x,sigma2_v")
        throw ParseError("profiles CSV: missing header 'node,sigma2_x,sigma2_v'");
    VarianceProfiles p;
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::size_t node = 0;
        double sx = 0.0, sv = 0.0;
        char c1 = 0, c2 = 0;
        if (!(fields >> node >> c1 >> sx >> c2 >> sv) || c1 != ',' || c2 != ',' ||
            node != expected || !(sx > 0.0) || !(sv >= 0.0)) {
            throw ParseError("profiles CSV: bad row '" + line + "'");
        }
        p.input.variances.push_back(sx);
        p.noise.variances.push_back(sv);
        ++expected;
    }
    return p;
}

}  // namespace difflms
