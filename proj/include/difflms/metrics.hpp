#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "difflms/algorithms.hpp"
#include "difflms/graph.hpp"

namespace difflms {

inline constexpr double kDbFloor = -320.0;

// 10 log10(x), clamped below at kDbFloor.
double to_db(double linear);

struct RunSeries {
    std::vector<double> mse;
    std::vector<double> msd;
};

struct LearningCurve {
    std::vector<double> mse_db;
    std::vector<double> msd_db;
    std::size_t n_runs = 0;

    std::size_t size() const noexcept { return mse_db.size(); }
};

// Linear-domain mean across runs, then dB.
LearningCurve average_curves(std::span<const RunSeries> runs);

// Smallest index i with msd_db[i] <= threshold_db.
std::optional<std::size_t> iterations_to_threshold(const LearningCurve& curve, double threshold_db);

// Mean of the linear MSE over the trailing `fraction` of the curve, in dB.
double tail_mean_mse_db(const LearningCurve& curve, double fraction = 0.1);

// Per-iteration cost of an algorithm beyond ATC.
struct CostReport {
    std::uint64_t extra_multiplications = 0;
    std::uint64_t extra_additions = 0;
    std::uint64_t extra_transmissions = 0;  // M x 1 vector sends

    bool operator==(const CostReport&) const = default;
};

CostReport cost_report(Algorithm algorithm, const Graph& graph, std::size_t filter_length);

// Header "iteration,mse_db,msd_db"; iteration counts from 1.
void write_curve_csv(std::ostream& out, const LearningCurve& curve);
LearningCurve read_curve_csv(std::istream& in);

void write_cost_report(std::ostream& out, const CostReport& report);

}  // namespace difflms
