#include "difflms/algorithms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

#include "difflms/error.hpp"

namespace difflms {

namespace {

struct Term {
    NodeIndex node;
    double weight;
};

// Nonzero entries of each row, ascending column, self weight kept apart.
struct SupportRows {
    std::vector<double> self;
    std::vector<std::vector<Term>> others;
};

SupportRows support_rows(const CombinationMatrix& m, std::size_t n, const char* label) {
    if (m.size() != n || static_cast<std::size_t>(m.weights.cols()) != n) {
        throw InvalidMatrix(std::string(label) + " matrix is " + std::to_string(m.weights.rows()) +
                            "x" + std::to_string(m.weights.cols()) + ", expected " +
                            std::to_string(n) + "x" + std::to_string(n));
    }
    SupportRows rows;
    rows.self.resize(n);
    rows.others.resize(n);
    for (NodeIndex k = 0; k < n; ++k) {
        double sum = 0.0;
        for (NodeIndex l = 0; l < n; ++l) {
            const double w = m(k, l);
            if (!(w >= 0.0) || !std::isfinite(w))
                throw InvalidMatrix(std::string(label) + " matrix has a negative or non-finite entry");
            sum += w;
            if (l == k) {
                rows.self[k] = w;
            } else if (w != 0.0) {
                rows.others[k].push_back({l, w});
            }
        }
        if (std::abs(sum - 1.0) > kStochasticTolerance)
            throw InvalidMatrix(std::string(label) + " matrix row " + std::to_string(k) +
                                " does not sum to 1");
    }
    return rows;
}

void check_support(const SupportRows& rows, const Graph& g, const char* label) {
    for (NodeIndex k = 0; k < rows.others.size(); ++k)
        for (const Term& t : rows.others[k])
            if (!g.adjacent(k, t.node))
                throw InvalidMatrix(std::string(label) + " matrix weights non-neighbours " +
                                    std::to_string(k) + " and " + std::to_string(t.node));
}

// acc = first nonzero term, then += the rest. A single unit weight
// reproduces its vector bit for bit.
void adapt_into(CVector& out, const CVector& state, const Sample& sample, double mu) {
    const Complex error = sample.observation - state.dot(sample.regressor);
    out = state;
    out += (mu * std::conj(error)) * sample.regressor;
}

void accumulate(CVector& acc, bool& started, double w, const CVector& v) {
    if (w == 0.0) return;
    if (!started) {
        acc = w * v;
        started = true;
    } else {
        acc += w * v;
    }
}

std::size_t check_inputs(const NetworkState& states, std::span<const Sample> samples,
                         const StepSizes& mu) {
    const std::size_t n = states.size();
    if (samples.size() != n || mu.mu.size() != n)
        throw DimensionMismatch("states, samples and step sizes must all have N entries");
    if (n == 0) return 0;
    const Eigen::Index m = states[0].omega.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (states[k].omega.size() != m || samples[k].regressor.size() != m)
            throw DimensionMismatch("node " + std::to_string(k) + " has a mismatched filter length");
        if (samples[k].node != k)
            throw DimensionMismatch("sample " + std::to_string(k) + " belongs to node " +
                                    std::to_string(samples[k].node));
    }
    return n;
}

void combine_row(CVector& acc, const SupportRows& rows, NodeIndex k,
                 const std::vector<const CVector*>& v) {
    bool started = false;
    // Members in ascending order with self in its sorted slot.
    auto it = rows.others[k].begin();
    const auto end = rows.others[k].end();
    for (; it != end && it->node < k; ++it) accumulate(acc, started, it->weight, *v[it->node]);
    accumulate(acc, started, rows.self[k], *v[k]);
    for (; it != end; ++it) accumulate(acc, started, it->weight, *v[it->node]);
    if (!started) acc = CVector::Zero(v[k]->size());
}

// The *_impl functions write into a pre-sized `out`, reusing its storage.
void atc_impl(const NetworkState& states, std::span<const Sample> samples, const SupportRows& c,
              const StepSizes& mu, NetworkState& out, std::vector<const CVector*>& scratch) {
    const std::size_t n = states.size();
    for (NodeIndex k = 0; k < n; ++k) {
        adapt_into(out[k].psi, states[k].omega, samples[k], mu.mu[k]);
        scratch[k] = &out[k].psi;
    }
    for (NodeIndex k = 0; k < n; ++k) {
        combine_row(out[k].omega, c, k, scratch);
        out[k].phi = out[k].psi;
    }
}

void cta_impl(const NetworkState& states, std::span<const Sample> samples, const SupportRows& c,
              const StepSizes& mu, NetworkState& out, std::vector<const CVector*>& scratch) {
    const std::size_t n = states.size();
    for (NodeIndex k = 0; k < n; ++k) scratch[k] = &states[k].omega;
    for (NodeIndex k = 0; k < n; ++k) combine_row(out[k].psi, c, k, scratch);
    for (NodeIndex k = 0; k < n; ++k) {
        adapt_into(out[k].phi, out[k].psi, samples[k], mu.mu[k]);
        out[k].omega = out[k].phi;
    }
}

void nocoop_impl(const NetworkState& states, std::span<const Sample> samples, const StepSizes& mu,
                 NetworkState& out) {
    const std::size_t n = states.size();
    for (NodeIndex k = 0; k < n; ++k) {
        adapt_into(out[k].psi, states[k].omega, samples[k], mu.mu[k]);
        out[k].phi = out[k].psi;
        out[k].omega = out[k].psi;
    }
}

void si_lms_impl(const NetworkState& states, std::span<const Sample> samples, const SupportRows& c,
                 const SupportRows& a, const StepSizes& mu, const std::vector<NodeIndex>& order,
                 const std::vector<std::size_t>& pos, NetworkState& out,
                 std::vector<const CVector*>& scratch) {
    const std::size_t n = states.size();
    for (NodeIndex k : order) {
        CVector& psi = out[k].psi;
        bool started = false;
        accumulate(psi, started, c.self[k], states[k].omega);
        for (const Term& t : c.others[k]) {
            // Earlier in the sweep: this iteration's adapted estimate is already published.
            const CVector& v = pos[t.node] < pos[k] ? out[t.node].phi : states[t.node].omega;
            accumulate(psi, started, t.weight, v);
        }
        if (!started) psi = CVector::Zero(states[k].omega.size());
        adapt_into(out[k].phi, psi, samples[k], mu.mu[k]);
    }
    for (NodeIndex k = 0; k < n; ++k) scratch[k] = &out[k].phi;
    for (NodeIndex k = 0; k < n; ++k) combine_row(out[k].omega, a, k, scratch);
}

// FNV-1a step over a whole 64-bit word.
void fnv_mix(std::uint64_t& h, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof v);
    h ^= bits;
    h *= 0x100000001b3ULL;
}

}  // namespace

NodeState NodeState::zeros(std::size_t m) {
    const auto size = static_cast<Eigen::Index>(m);
    return {CVector::Zero(size), CVector::Zero(size), CVector::Zero(size)};
}

StepSizes StepSizes::constant(std::size_t n, double mu) { return {std::vector<double>(n, mu)}; }

Schedule Schedule::ascending(std::size_t n) {
    Schedule s;
    s.order.resize(n);
    for (std::size_t k = 0; k < n; ++k) s.order[k] = k;
    return s;
}

Schedule Schedule::reversed() const { return {std::vector<NodeIndex>(order.rbegin(), order.rend())}; }

std::vector<std::size_t> Schedule::positions(std::size_t n) const {
    if (order.size() != n)
        throw InvalidSchedule("schedule has " + std::to_string(order.size()) + " entries, expected " +
                              std::to_string(n));
    std::vector<std::size_t> pos(n, n);
    for (std::size_t p = 0; p < n; ++p) {
        const NodeIndex k = order[p];
        if (k >= n || pos[k] != n) throw InvalidSchedule("schedule is not a permutation of 0..N-1");
        pos[k] = p;
    }
    return pos;
}

std::string_view algorithm_name(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::NoCoop: return "NoCoop";
        case Algorithm::ATC: return "ATC";
        case Algorithm::CTA: return "CTA";
        case Algorithm::SILMS: return "SILMS";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    for (Algorithm a : {Algorithm::NoCoop, Algorithm::ATC, Algorithm::CTA, Algorithm::SILMS}) {
        const auto canonical = algorithm_name(a);
        if (name.size() == canonical.size() &&
            std::equal(name.begin(), name.end(), canonical.begin(),
                       [](char x, char y) { return std::tolower(x) == std::tolower(y); }))
            return a;
    }
    throw ParseError("unknown algorithm '" + std::string(name) +
                     "' (valid: NoCoop, ATC, CTA, SILMS)");
}

std::string_view error_metric_name(ErrorMetric m) noexcept {
    return m == ErrorMetric::APriori ? "a_priori" : "a_posteriori";
}

ErrorMetric parse_error_metric(std::string_view name) {
    if (name == "a_priori") return ErrorMetric::APriori;
    if (name == "a_posteriori") return ErrorMetric::APosteriori;
    throw ParseError("unknown error metric '" + std::string(name) +
                     "' (valid: a_priori, a_posteriori)");
}

CVector lms_adapt(const CVector& state, const Sample& sample, double mu) {
    if (state.size() != sample.regressor.size())
        throw DimensionMismatch("estimate and regressor lengths differ");
    CVector out;
    adapt_into(out, state, sample, mu);
    return out;
}

CVector combine(std::span<const WeightedEstimate> estimates) {
    if (estimates.empty()) throw DimensionMismatch("combine needs at least one estimate");
    const Eigen::Index m = estimates.front().estimate.get().size();
    CVector acc;
    bool started = false;
    for (const auto& e : estimates) {
        if (e.estimate.get().size() != m) throw DimensionMismatch("estimates differ in length");
        accumulate(acc, started, e.weight, e.estimate.get());
    }
    if (!started) acc = CVector::Zero(m);
    return acc;
}

NetworkState nocoop_iteration(const NetworkState& states, std::span<const Sample> samples,
                              const StepSizes& mu) {
    const std::size_t n = check_inputs(states, samples, mu);
    NetworkState out(n);
    nocoop_impl(states, samples, mu, out);
    return out;
}

NetworkState atc_iteration(const NetworkState& states, std::span<const Sample> samples,
                           const CombinationMatrix& c, const StepSizes& mu) {
    const std::size_t n = check_inputs(states, samples, mu);
    const SupportRows rows = support_rows(c, n, "C");
    NetworkState out(n);
    std::vector<const CVector*> scratch(n);
    atc_impl(states, samples, rows, mu, out, scratch);
    return out;
}

NetworkState cta_iteration(const NetworkState& states, std::span<const Sample> samples,
                           const CombinationMatrix& c, const StepSizes& mu) {
    const std::size_t n = check_inputs(states, samples, mu);
    const SupportRows rows = support_rows(c, n, "C");
    NetworkState out(n);
    std::vector<const CVector*> scratch(n);
    cta_impl(states, samples, rows, mu, out, scratch);
    return out;
}

NetworkState si_lms_iteration(const NetworkState& states, std::span<const Sample> samples,
                              const CombinationMatrix& c, const CombinationMatrix& a,
                              const StepSizes& mu, const Schedule& schedule) {
    const std::size_t n = check_inputs(states, samples, mu);
    const auto pos = schedule.positions(n);
    const SupportRows c_rows = support_rows(c, n, "C");
    const SupportRows a_rows = support_rows(a, n, "A");
    NetworkState out(n);
    std::vector<const CVector*> scratch(n);
    si_lms_impl(states, samples, c_rows, a_rows, mu, schedule.order, pos, out, scratch);
    return out;
}

Trajectory run_trajectory(Algorithm algorithm, const Graph& graph, const CombinationMatrix& c,
                          const CombinationMatrix& a, const StepSizes& mu,
                          const ParameterVector& omega0, const VarianceProfiles& profiles,
                          std::size_t n_iterations, std::uint64_t rng_seed,
                          const TrajectoryOptions& options) {
    const std::size_t n = graph.size();
    const std::size_t m = omega0.size();
    if (n_iterations == 0) throw DimensionMismatch("n_iterations must be at least 1");
    if (m == 0) throw DimensionMismatch("filter length must be at least 1");
    if (mu.mu.size() != n || profiles.input.variances.size() != n ||
        profiles.noise.variances.size() != n)
        throw DimensionMismatch("step sizes and variance profiles must have N entries");

    const SupportRows c_rows = support_rows(c, n, "C");
    const SupportRows a_rows = support_rows(a, n, "A");
    check_support(c_rows, graph, "C");
    check_support(a_rows, graph, "A");
    const Schedule schedule = options.schedule.value_or(Schedule::ascending(n));
    const auto pos = schedule.positions(n);

    std::vector<RngStream> streams;
    streams.reserve(n);
    for (NodeIndex k = 0; k < n; ++k) streams.emplace_back(derive_seed(rng_seed, {kSampleStreamTag, k}));

    Trajectory out;
    out.mse.reserve(n_iterations);
    out.msd.reserve(n_iterations);
    if (options.record_history) out.history.reserve(n_iterations);
    std::uint64_t checksum = 0xcbf29ce484222325ULL;

    NetworkState states(n, NodeState::zeros(m));
    NetworkState next(n, NodeState::zeros(m));
    std::vector<const CVector*> scratch(n);
    std::vector<Sample> samples(n);
    const double inv_n = 1.0 / static_cast<double>(n);

    for (std::size_t i = 0; i < n_iterations; ++i) {
        // All draws for time i happen before any update so the sweep order
        // cannot perturb the streams.
        for (NodeIndex k = 0; k < n; ++k) {
            draw_sample_into(samples[k], k, omega0, profiles.input, profiles.noise, streams[k],
                             options.signal_type);
            for (Eigen::Index j = 0; j < samples[k].regressor.size(); ++j) {
                fnv_mix(checksum, samples[k].regressor[j].real());
                fnv_mix(checksum, samples[k].regressor[j].imag());
            }
            fnv_mix(checksum, samples[k].observation.real());
            fnv_mix(checksum, samples[k].observation.imag());
        }

        auto squared_error = [&](const NetworkState& s) {
            double total = 0.0;
            for (NodeIndex k = 0; k < n; ++k)
                total += std::norm(samples[k].observation - s[k].omega.dot(samples[k].regressor));
            return total * inv_n;
        };

        const double prior_error =
            options.error_metric == ErrorMetric::APriori ? squared_error(states) : 0.0;

        switch (algorithm) {
            case Algorithm::NoCoop: nocoop_impl(states, samples, mu, next); break;
            case Algorithm::ATC: atc_impl(states, samples, c_rows, mu, next, scratch); break;
            case Algorithm::CTA: cta_impl(states, samples, c_rows, mu, next, scratch); break;
            case Algorithm::SILMS:
                si_lms_impl(states, samples, c_rows, a_rows, mu, schedule.order, pos, next, scratch);
                break;
        }
        std::swap(states, next);

        out.mse.push_back(options.error_metric == ErrorMetric::APriori ? prior_error
                                                                        : squared_error(states));
        double dev = 0.0;
        for (NodeIndex k = 0; k < n; ++k) dev += (states[k].omega - omega0.entries).squaredNorm();
        out.msd.push_back(dev * inv_n);
        if (options.record_history) out.history.push_back(states);
    }
    out.final_states = std::move(states);
    out.sample_checksum = checksum;
    return out;
}

}  // namespace difflms
