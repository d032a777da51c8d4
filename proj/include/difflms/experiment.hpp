#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "difflms/algorithms.hpp"
#include "difflms/combiners.hpp"
#include "difflms/graph.hpp"
#include "difflms/metrics.hpp"
#include "difflms/signal.hpp"

namespace difflms {

inline constexpr double kDefaultGraphRadius = 0.4;

// "generated[:radius]" or a path to an edge-list file.
struct GraphSource {
    std::optional<std::string> path;
    double radius = kDefaultGraphRadius;

    std::string to_string() const;
    static GraphSource parse(const std::string& text);
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::size_t n_nodes = 20;
    std::size_t filter_length = 5;
    double step_size = 0.01;
    std::size_t n_iterations = 2000;
    std::size_t n_runs = 100;
    VarianceMode variance_mode = VarianceMode::Equal;
    CombinerRule combiner_rule = CombinerRule::Metropolis;
    std::optional<CombinerRule> second_combiner_rule;  // same as combiner_rule when unset
    double laplacian_kappa = 1.0;
    std::vector<Algorithm> algorithms{Algorithm::ATC, Algorithm::SILMS};
    std::uint64_t master_seed = 20170305;
    GraphSource graph_source;
    std::optional<Schedule> schedule;  // ascending when unset
    ErrorMetric error_metric = ErrorMetric::APriori;
    SignalType signal_type = SignalType::Complex;
    // Convergence threshold in dB relative to the initial MSD.
    double threshold_db = -20.0;

    CombinerRule resolved_second_rule() const { return second_combiner_rule.value_or(combiner_rule); }
};

// Throws ConfigError naming the first offending field.
void validate_config(const ExperimentConfig& cfg);

// Flat key=value text, '#' comments. Unknown keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig read_config_file(const std::string& path);
void write_config(std::ostream& out, const ExperimentConfig& cfg);

// Seed tags for the per-experiment substreams.
inline constexpr std::uint64_t kGraphSeedTag = 1;
inline constexpr std::uint64_t kOmegaSeedTag = 2;
inline constexpr std::uint64_t kProfileSeedTag = 3;
inline constexpr std::uint64_t kRunSeedTag = 4;

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run);

struct AlgorithmResult {
    Algorithm algorithm;
    LearningCurve curve;
    CostReport cost;
    std::optional<std::size_t> iterations_to_threshold;  // iteration count, 1-based
    double steady_state_mse_db = 0.0;                     // trailing 10% mean
    std::vector<std::uint64_t> run_checksums;             // sample checksum per run
};

struct ExperimentResult {
    ExperimentConfig config;
    Graph graph;
    ParameterVector omega0;
    VarianceProfiles profiles;
    double threshold_abs_db = 0.0;
    std::vector<AlgorithmResult> algorithms;

    const AlgorithmResult* find(Algorithm a) const;
};

// Graph, omega0 and profiles are drawn once per experiment; every run uses
// fresh sample streams shared by all algorithms (paired comparison).
// threads == 0 picks the hardware concurrency; the result does not depend on it.
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

// Ratio SILMS/ATC of iterations to threshold, when both reached it.
std::optional<double> silms_atc_ratio(const ExperimentResult& result);

void write_summary(std::ostream& out, const ExperimentResult& result);

// config_echo.txt, graph.edges, profiles.csv, curve_<alg>.csv, costs.txt, summary.txt
void write_result(const std::filesystem::path& out_dir, const ExperimentResult& result);

// Equal variances at mu 0.01, varying at mu 0.01, varying at mu 0.05; all on
// the same master seed so they share topology, omega0 and varying profiles.
std::vector<ExperimentConfig> reference_scenarios();

}  // namespace difflms
