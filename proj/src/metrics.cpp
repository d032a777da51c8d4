#include "difflms/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "difflms/error.hpp"

namespace difflms {

double to_db(double linear) {
    if (!(linear > 0.0)) return kDbFloor;
    return std::max(10.0 * std::log10(linear), kDbFloor);
}

LearningCurve average_curves(std::span<const RunSeries> runs) {
    if (runs.empty()) throw EmptyInput("average_curves needs at least one run");
    const std::size_t len = runs.front().mse.size();
    for (const auto& r : runs)
        if (r.mse.size() != len || r.msd.size() != len)
            throw LengthMismatch("runs have different lengths");

    std::vector<double> mse(len, 0.0), msd(len, 0.0);
    for (const auto& r : runs) {
        for (std::size_t i = 0; i < len; ++i) {
            mse[i] += r.mse[i];
            msd[i] += r.msd[i];
        }
    }
    LearningCurve curve;
    curve.n_runs = runs.size();
    curve.mse_db.resize(len);
    curve.msd_db.resize(len);
    const double scale = 1.0 / static_cast<double>(runs.size());
    for (std::size_t i = 0; i < len; ++i) {
        curve.mse_db[i] = to_db(mse[i] * scale);
        curve.msd_db[i] = to_db(msd[i] * scale);
    }
    return curve;
}

std::optional<std::size_t> iterations_to_threshold(const LearningCurve& curve, double threshold_db) {
    for (std::size_t i = 0; i < curve.msd_db.size(); ++i)
        if (curve.msd_db[i] <= threshold_db) return i;
    return std::nullopt;
}

double tail_mean_mse_db(const LearningCurve& curve, double fraction) {
    const std::size_t len = curve.mse_db.size();
    if (len == 0) throw EmptyInput("empty learning curve");
    const auto tail = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(len))));
    double sum = 0.0;
    for (std::size_t i = len - tail; i < len; ++i) sum += std::pow(10.0, curve.mse_db[i] / 10.0);
    return to_db(sum / static_cast<double>(tail));
}

CostReport cost_report(Algorithm algorithm, const Graph& graph, std::size_t filter_length) {
    if (algorithm != Algorithm::SILMS) return {};
    std::uint64_t neighbourhood_total = 0;
    std::uint64_t sends = 0;
    for (NodeIndex k = 0; k < graph.size(); ++k) {
        neighbourhood_total += graph.degree(k);
        sends += graph.degree(k) - 1;
    }
    const std::uint64_t m = filter_length;
    return {m * neighbourhood_total, m * neighbourhood_total, sends};
}

void write_curve_csv(std::ostream& out, const LearningCurve& curve) {
    out << "iteration,mse_db,msd_db\n";
    char buf[96];
    for (std::size_t i = 0; i < curve.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, curve.mse_db[i], curve.msd_db[i]);
        out << buf;
    }
}

LearningCurve read_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "iteration,mse_db,msd_db")
        throw ParseError("curve CSV: missing header 'iteration,mse_db,msd_db'");
    LearningCurve curve;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::size_t it = 0;
        double mse = 0.0, msd = 0.0;
        char c1 = 0, c2 = 0;
        if (!(fields >> it >> c1 >> mse >> c2 >> msd) || c1 != ',' || c2 != ',')
            throw ParseError("curve CSV: bad row '" + line + "'");
        curve.mse_db.push_back(mse);
        curve.msd_db.push_back(msd);
    }
    return curve;
}

void write_cost_report(std::ostream& out, const CostReport& report) {
    out << "extra_multiplications=" << report.extra_multiplications << '\n'
        << "extra_additions=" << report.extra_additions << '\n'
        << "extra_transmissions=" << report.extra_transmissions << '\n';
}

}  // namespace difflms
