#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "difflms/combiners.hpp"
#include "difflms/graph.hpp"
#include "difflms/signal.hpp"

namespace difflms {

// Per-node estimates for one iteration.
//   omega: current estimate
//   psi:   intermediate (ATC: adapted; CTA and SI-LMS: pre-adaptation combination)
//   phi:   adapted estimate (equal to the adapted vector for every strategy)
struct NodeState {
    CVector omega;
    CVector psi;
    CVector phi;

    static NodeState zeros(std::size_t m);
};

struct StepSizes {
    std::vector<double> mu;

    static StepSizes constant(std::size_t n, double mu);
};

// Serial update order; position in `order` replaces the node index in the
// earlier/later neighbour split of SI-LMS.
struct Schedule {
    std::vector<NodeIndex> order;

    static Schedule ascending(std::size_t n);
    Schedule reversed() const;
    // positions()[k] = position of node k in order. Throws InvalidSchedule.
    std::vector<std::size_t> positions(std::size_t n) const;
};

enum class Algorithm { NoCoop, ATC, CTA, SILMS };

std::string_view algorithm_name(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view name);

enum class ErrorMetric { APriori, APosteriori };

std::string_view error_metric_name(ErrorMetric m) noexcept;
ErrorMetric parse_error_metric(std::string_view name);

// state + mu * x * conj(d - state^H x)
CVector lms_adapt(const CVector& state, const Sample& sample, double mu);

struct WeightedEstimate {
    std::reference_wrapper<const CVector> estimate;
    double weight;
};

// Weighted sum; zero-weight terms are skipped.
CVector combine(std::span<const WeightedEstimate> estimates);

using NetworkState = std::vector<NodeState>;

NetworkState nocoop_iteration(const NetworkState& states, std::span<const Sample> samples,
                              const StepSizes& mu);

NetworkState atc_iteration(const NetworkState& states, std::span<const Sample> samples,
                           const CombinationMatrix& c, const StepSizes& mu);

NetworkState cta_iteration(const NetworkState& states, std::span<const Sample> samples,
                           const CombinationMatrix& c, const StepSizes& mu);

// Serial sweep in schedule order: node k first combines prior estimates of
// later neighbours with the fresh adapted estimates of earlier ones (C),
// adapts, and publishes phi_k. Once every node has adapted, each node
// combines the adapted estimates with A.
NetworkState si_lms_iteration(const NetworkState& states, std::span<const Sample> samples,
                              const CombinationMatrix& c, const CombinationMatrix& a,
                              const StepSizes& mu, const Schedule& schedule);

struct TrajectoryOptions {
    std::optional<Schedule> schedule;  // ascending when unset
    ErrorMetric error_metric = ErrorMetric::APriori;
    SignalType signal_type = SignalType::Complex;
    bool record_history = false;
};

struct Trajectory {
    std::vector<double> mse;  // network squared error per iteration
    std::vector<double> msd;  // (1/N) sum ||omega_k - omega0||^2 after each iteration
    std::vector<NetworkState> history;  // filled only with record_history
    NetworkState final_states;
    std::uint64_t sample_checksum = 0;  // word-wise FNV-1a over every sample consumed
};

// Stream for node k is seeded with derive_seed(rng_seed, {kSampleStreamTag, k}),
// so trajectories of different algorithms under the same seed see the same data.
inline constexpr std::uint64_t kSampleStreamTag = 0x53414d50;

Trajectory run_trajectory(Algorithm algorithm, const Graph& graph, const CombinationMatrix& c,
                          const CombinationMatrix& a, const StepSizes& mu,
                          const ParameterVector& omega0, const VarianceProfiles& profiles,
                          std::size_t n_iterations, std::uint64_t rng_seed,
                          const TrajectoryOptions& options = {});

}  // namespace difflms
