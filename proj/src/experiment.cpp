#include "difflms/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "difflms/error.hpp"

namespace difflms {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream stream(s);
    std::string part;
    while (std::getline(stream, part, sep)) parts.push_back(trim(part));
    return parts;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& field, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v))
        throw ConfigError(field, "expected a number, got '" + text + "'");
    return v;
}

std::uint64_t parse_unsigned(const std::string& field, const std::string& text) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw ConfigError(field, "integer out of range: '" + text + "'");
    }
}

template <typename F>
auto wrap_parse(const std::string& field, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw ConfigError(field, e.what());
    }
}

std::string schedule_string(const std::optional<Schedule>& s) {
    if (!s) return "ascending";
    std::string out;
    for (NodeIndex k : s->order) {
        if (!out.empty()) out += ',';
        out += std::to_string(k);
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"name", [](auto& c, auto&, auto& v) { c.name = v; }},
        {"n_nodes", [](auto& c, auto& f, auto& v) { c.n_nodes = parse_unsigned(f, v); }},
        {"filter_length", [](auto& c, auto& f, auto& v) { c.filter_length = parse_unsigned(f, v); }},
        {"step_size", [](auto& c, auto& f, auto& v) { c.step_size = parse_double(f, v); }},
        {"n_iterations", [](auto& c, auto& f, auto& v) { c.n_iterations = parse_unsigned(f, v); }},
        {"n_runs", [](auto& c, auto& f, auto& v) { c.n_runs = parse_unsigned(f, v); }},
        {"variance_mode",
         [](auto& c, auto& f, auto& v) { c.variance_mode = wrap_parse(f, [&] { return parse_variance_mode(v); }); }},
        {"combiner_rule",
         [](auto& c, auto& f, auto& v) { c.combiner_rule = wrap_parse(f, [&] { return parse_rule(v); }); }},
        {"second_combiner_rule",
         [](auto& c, auto& f, auto& v) {
             if (v == "same") {
                 c.second_combiner_rule.reset();
             } else {
                 c.second_combiner_rule = wrap_parse(f, [&] { return parse_rule(v); });
             }
         }},
        {"laplacian_kappa", [](auto& c, auto& f, auto& v) { c.laplacian_kappa = parse_double(f, v); }},
        {"algorithms",
         [](auto& c, auto& f, auto& v) {
             c.algorithms.clear();
             for (const auto& part : split(v, ','))
                 if (!part.empty())
                     c.algorithms.push_back(wrap_parse(f, [&] { return parse_algorithm(part); }));
         }},
        {"master_seed", [](auto& c, auto& f, auto& v) { c.master_seed = parse_unsigned(f, v); }},
        {"graph_source",
         [](auto& c, auto& f, auto& v) { c.graph_source = wrap_parse(f, [&] { return GraphSource::parse(v); }); }},
        {"schedule",
         [](auto& c, auto& f, auto& v) {
             if (v == "ascending") {
                 c.schedule.reset();
                 return;
             }
             Schedule s;
             for (const auto& part : split(v, ',')) s.order.push_back(parse_unsigned(f, part));
             c.schedule = std::move(s);
         }},
        {"error_metric",
         [](auto& c, auto& f, auto& v) { c.error_metric = wrap_parse(f, [&] { return parse_error_metric(v); }); }},
        {"signal_type",
         [](auto& c, auto& f, auto& v) { c.signal_type = wrap_parse(f, [&] { return parse_signal_type(v); }); }},
        {"threshold_db", [](auto& c, auto& f, auto& v) { c.threshold_db = parse_double(f, v); }},
    };
    return table;
}

std::size_t run_count_threads(unsigned threads, std::size_t n_runs) {
    std::size_t t = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    return std::clamp<std::size_t>(t, 1, n_runs);
}

}  // namespace

std::string GraphSource::to_string() const {
    if (path) return *path;
    return "generated:" + format_double(radius);
}

GraphSource GraphSource::parse(const std::string& text) {
    GraphSource src;
    if (text == "generated") return src;
    if (text.rfind("generated:", 0) == 0) {
        const std::string r = text.substr(10);
        std::size_t used = 0;
        try {
            src.radius = std::stod(r, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != r.size())
            throw ParseError("bad radius in graph_source '" + text + "'");
        return src;
    }
    if (text.empty()) throw ParseError("graph_source is empty");
    src.path = text;
    return src;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.n_nodes == 0) throw ConfigError("n_nodes", "must be positive");
    if (cfg.filter_length == 0) throw ConfigError("filter_length", "must be positive");
    if (!(cfg.step_size > 0.0) || !std::isfinite(cfg.step_size))
        throw ConfigError("step_size", "must be positive");
    if (cfg.n_iterations == 0) throw ConfigError("n_iterations", "must be positive");
    if (cfg.n_runs == 0) throw ConfigError("n_runs", "must be positive");
    if (cfg.algorithms.empty()) throw ConfigError("algorithms", "must list at least one algorithm");
    if (!(cfg.laplacian_kappa > 0.0 && cfg.laplacian_kappa <= 1.0))
        throw ConfigError("laplacian_kappa", "must lie in (0, 1]");
    if (!cfg.graph_source.path &&
        !(cfg.graph_source.radius > 0.0 && cfg.graph_source.radius <= std::sqrt(2.0)))
        throw ConfigError("graph_source", "radius must lie in (0, sqrt(2)]");
    if (!std::isfinite(cfg.threshold_db)) throw ConfigError("threshold_db", "must be finite");
    if (cfg.schedule) {
        try {
            cfg.schedule->positions(cfg.n_nodes);
        } catch (const InvalidSchedule& e) {
            throw ConfigError("schedule", e.what());
        }
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(key, "unknown configuration key");
        it->second(cfg, key, value);
    }
    return cfg;
}

ExperimentConfig read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
    std::string algs;
    for (Algorithm a : cfg.algorithms) {
        if (!algs.empty()) algs += ',';
        algs += algorithm_name(a);
    }
    out << "name=" << cfg.name << '\n'
        << "n_nodes=" << cfg.n_nodes << '\n'
        << "filter_length=" << cfg.filter_length << '\n'
        << "step_size=" << format_double(cfg.step_size) << '\n'
        << "n_iterations=" << cfg.n_iterations << '\n'
        << "n_runs=" << cfg.n_runs << '\n'
        << "variance_mode=" << variance_mode_name(cfg.variance_mode) << '\n'
        << "combiner_rule=" << rule_name(cfg.combiner_rule) << '\n'
        << "second_combiner_rule="
        << (cfg.second_combiner_rule ? rule_name(*cfg.second_combiner_rule) : "same") << '\n'
        << "laplacian_kappa=" << format_double(cfg.laplacian_kappa) << '\n'
        << "algorithms=" << algs << '\n'
        << "master_seed=" << cfg.master_seed << '\n'
        << "graph_source=" << cfg.graph_source.to_string() << '\n'
        << "schedule=" << schedule_string(cfg.schedule) << '\n'
        << "error_metric=" << error_metric_name(cfg.error_metric) << '\n'
        << "signal_type=" << signal_type_name(cfg.signal_type) << '\n'
        << "threshold_db=" << format_double(cfg.threshold_db) << '\n';
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run) {
    return derive_seed(master_seed, {kRunSeedTag, run});
}

const AlgorithmResult* ExperimentResult::find(Algorithm a) const {
    for (const auto& r : algorithms)
        if (r.algorithm == a) return &r;
    return nullptr;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    validate_config(cfg);

    Graph graph = [&] {
        if (!cfg.graph_source.path)
            return random_geometric_graph(cfg.n_nodes, cfg.graph_source.radius,
                                          derive_seed(cfg.master_seed, {kGraphSeedTag}));
        try {
            Graph g = read_edge_list_file(*cfg.graph_source.path);
            if (g.size() != cfg.n_nodes)
                throw ConfigError("graph_source", "edge list has " + std::to_string(g.size()) +
                                                      " nodes but n_nodes is " +
                                                      std::to_string(cfg.n_nodes));
            return g;
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError("graph_source", e.what());
        }
    }();

    const CombinationMatrix c = make_combiner(cfg.combiner_rule, graph, cfg.laplacian_kappa);
    const CombinationMatrix a = make_combiner(cfg.resolved_second_rule(), graph, cfg.laplacian_kappa);
    ParameterVector omega0 = random_parameter(cfg.filter_length, derive_seed(cfg.master_seed, {kOmegaSeedTag}));
    VarianceProfiles profiles =
        variance_profiles(cfg.n_nodes, cfg.variance_mode, derive_seed(cfg.master_seed, {kProfileSeedTag}));
    const StepSizes mu = StepSizes::constant(cfg.n_nodes, cfg.step_size);

    TrajectoryOptions options;
    options.schedule = cfg.schedule;
    options.error_metric = cfg.error_metric;
    options.signal_type = cfg.signal_type;

    const std::size_t n_algs = cfg.algorithms.size();
    // series[alg][run]
    std::vector<std::vector<RunSeries>> series(n_algs, std::vector<RunSeries>(cfg.n_runs));
    std::vector<std::vector<std::uint64_t>> checksums(n_algs, std::vector<std::uint64_t>(cfg.n_runs));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        try {
            for (std::size_t r = next++; r < cfg.n_runs && !failed; r = next++) {
                const std::uint64_t seed = run_seed(cfg.master_seed, r);
                for (std::size_t j = 0; j < n_algs; ++j) {
                    Trajectory t = run_trajectory(cfg.algorithms[j], graph, c, a, mu, omega0, profiles,
                                                  cfg.n_iterations, seed, options);
                    series[j][r] = {std::move(t.mse), std::move(t.msd)};
                    checksums[j][r] = t.sample_checksum;
                }
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };
    const std::size_t n_threads = run_count_threads(threads, cfg.n_runs);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentResult result{cfg, std::move(graph), std::move(omega0), std::move(profiles), 0.0, {}};
    result.threshold_abs_db = to_db(result.omega0.entries.squaredNorm()) + cfg.threshold_db;
    for (std::size_t j = 0; j < n_algs; ++j) {
        AlgorithmResult r;
        r.algorithm = cfg.algorithms[j];
        r.curve = average_curves(series[j]);
        r.cost = cost_report(r.algorithm, result.graph, cfg.filter_length);
        if (auto idx = iterations_to_threshold(r.curve, result.threshold_abs_db)) r.iterations_to_threshold = *idx + 1;
        r.steady_state_mse_db = tail_mean_mse_db(r.curve, 0.1);
        r.run_checksums = std::move(checksums[j]);
        result.algorithms.push_back(std::move(r));
    }
    return result;
}

std::optional<double> silms_atc_ratio(const ExperimentResult& result) {
    const auto* atc = result.find(Algorithm::ATC);
    const auto* si = result.find(Algorithm::SILMS);
    if (!atc || !si || !atc->iterations_to_threshold || !si->iterations_to_threshold) return std::nullopt;
    return static_cast<double>(*si->iterations_to_threshold) /
           static_cast<double>(*atc->iterations_to_threshold);
}

void write_summary(std::ostream& out, const ExperimentResult& result) {
    char buf[128];
    out << "name=" << result.config.name << '\n';
    out << "threshold_db=" << format_double(result.config.threshold_db) << '\n';
    std::snprintf(buf, sizeof buf, "%.6f", result.threshold_abs_db);
    out << "threshold_abs_db=" << buf << '\n';
    out << "pairing=paired (all algorithms share each run's sample streams)\n";
    for (const auto& r : result.algorithms) {
        const std::string name(algorithm_name(r.algorithm));
        out << name << ".iterations_to_threshold="
            << (r.iterations_to_threshold ? std::to_string(*r.iterations_to_threshold) : "not-reached")
            << '\n';
        std::snprintf(buf, sizeof buf, "%.6f", r.steady_state_mse_db);
        out << name << ".steady_state_mse_db=" << buf << '\n';
    }
    if (auto ratio = silms_atc_ratio(result)) {
        std::snprintf(buf, sizeof buf, "%.6f", *ratio);
        out << "silms_atc_iteration_ratio=" << buf << '\n';
        std::snprintf(buf, sizeof buf, "%.2f", 100.0 * (1.0 - *ratio));
        out << "silms_reduction_percent=" << buf << '\n';
    }
}

void write_result(const std::filesystem::path& out_dir, const ExperimentResult& result) {
    auto open = [&](const std::string& name) {
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) throw Error("cannot write '" + (out_dir / name).string() + "'");
        return f;
    };
    {
        auto f = open("config_echo.txt");
        write_config(f, result.config);
    }
    {
        auto f = open("graph.edges");
        write_edge_list(f, result.graph);
    }
    {
        auto f = open("profiles.csv");
        write_profiles_csv(f, result.profiles);
    }
    for (const auto& r : result.algorithms) {
        auto f = open("curve_" + std::string(algorithm_name(r.algorithm)) + ".csv");
        write_curve_csv(f, r.curve);
    }
    {
        auto f = open("costs.txt");
        for (const auto& r : result.algorithms) {
            f << "[" << algorithm_name(r.algorithm) << "]\n";
            write_cost_report(f, r.cost);
        }
    }
    {
        auto f = open("summary.txt");
        write_summary(f, result);
    }
}

std::vector<ExperimentConfig> reference_scenarios() {
    ExperimentConfig equal;
    equal.name = "equal_mu0.01";
    equal.variance_mode = VarianceMode::Equal;
    equal.step_size = 0.01;

    ExperimentConfig varying = equal;
    varying.name = "varying_mu0.01";
    varying.variance_mode = VarianceMode::Varying;

    ExperimentConfig varying_large = varying;
    varying_large.name = "varying_mu0.05";
    varying_large.step_size = 0.05;

    return {equal, varying, varying_large};
}

}  // namespace difflms
