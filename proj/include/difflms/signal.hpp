#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <random>
#include <string_view>
#include <vector>

#include "difflms/graph.hpp"

namespace difflms {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

// Deterministic seed for a labelled substream of `master`, e.g.
// derive_seed(master, {tag, run, node}). Distinct paths give decorrelated
// engines; the result depends only on the arguments.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

enum class SignalType { Complex, Real };

std::string_view signal_type_name(SignalType t) noexcept;
SignalType parse_signal_type(std::string_view name);

// Exclusively owned random stream for one (run, node) context.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    // Zero-mean circular complex Gaussian with E|z|^2 = variance, or a real
    // Gaussian of the same variance when type is Real.
    Complex gaussian(double variance, SignalType type = SignalType::Complex);
    double uniform(double lo, double hi);
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct ParameterVector {
    CVector entries;
    std::size_t size() const noexcept { return static_cast<std::size_t>(entries.size()); }
};

// Per-node regressor power, all > 0.
struct InputProfile {
    std::vector<double> variances;
};

// Per-node noise variance. Zero is accepted for noiseless checks.
struct NoiseProfile {
    std::vector<double> variances;
};

struct Sample {
    NodeIndex node = 0;
    CVector regressor;
    Complex observation;
};

// i.i.d. circular Gaussian entries normalized to unit Euclidean norm.
ParameterVector random_parameter(std::size_t m, std::uint64_t rng_seed);

// x ~ CN(0, s2_x I), n ~ CN(0, s2_v), d = omega0^H x + n. Always consumes the
// same number of draws from `stream` for a given M.
Sample draw_sample(NodeIndex node, const ParameterVector& omega0, const InputProfile& input,
                   const NoiseProfile& noise, RngStream& stream,
                   SignalType type = SignalType::Complex);

// draw_sample() writing into existing storage.
void draw_sample_into(Sample& out, NodeIndex node, const ParameterVector& omega0,
                      const InputProfile& input, const NoiseProfile& noise, RngStream& stream,
                      SignalType type = SignalType::Complex);

enum class VarianceMode { Equal, Varying };

std::string_view variance_mode_name(VarianceMode m) noexcept;
VarianceMode parse_variance_mode(std::string_view name);

struct VarianceProfiles {
    InputProfile input;
    NoiseProfile noise;
};

inline constexpr double kEqualInputVariance = 1.0;
inline constexpr double kEqualNoiseVariance = 0.01;
inline constexpr double kVaryingInputMin = 0.5;
inline constexpr double kVaryingInputMax = 2.0;
inline constexpr double kVaryingNoiseMin = 0.005;
inline constexpr double kVaryingNoiseMax = 0.05;

VarianceProfiles variance_profiles(std::size_t n, VarianceMode mode, std::uint64_t rng_seed);

// CSV with header "node,sigma2_x,sigma2_v".
void write_profiles_csv(std::ostream& out, const VarianceProfiles& p);
VarianceProfiles read_profiles_csv(std::istream& in);

}  // namespace difflms
