#include "difflms/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <ostream>
#include <string>
#include <vector>

#include "difflms/error.hpp"
#include "difflms/experiment.hpp"
#include "difflms/metrics.hpp"
#include "difflms/plot.hpp"

namespace fs = std::filesystem;

namespace difflms {

namespace {

// Usage-class failures map to exit code 2.
struct UsageError : Error {
    using Error::Error;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> iterations;
    unsigned threads = 0;

    void apply(ExperimentConfig& cfg) const {
        if (seed) cfg.master_seed = *seed;
        if (runs) cfg.n_runs = *runs;
        if (iterations) cfg.n_iterations = *iterations;
    }
};

void make_output_dir(const fs::path& dir) {
    // The parent must already exist; only the leaf is created.
    std::error_code ec;
    if (fs::is_directory(dir, ec)) return;
    if (!fs::create_directory(dir, ec) || ec)
        throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
}

Graph load_graph(const std::string& path) {
    try {
        return read_edge_list_file(path);
    } catch (const Error& e) {
        throw UsageError(std::string("graph '") + path + "': " + e.what());
    }
}

std::vector<std::string> algorithm_labels(const ExperimentResult& r) {
    std::vector<std::string> labels;
    for (const auto& a : r.algorithms) labels.emplace_back(algorithm_name(a.algorithm));
    return labels;
}

ExperimentResult run_and_write(const ExperimentConfig& cfg, const fs::path& dir, unsigned threads) {
    validate_config(cfg);
    make_output_dir(dir);
    ExperimentResult result = run_experiment(cfg, threads);
    write_result(dir, result);
    const auto labels = algorithm_labels(result);
    write_mse_plot(dir, labels, "Network MSE: " + cfg.name);
    return result;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const Overrides& o,
            std::ostream& out) {
    ExperimentConfig cfg = read_config_file(config_path);
    o.apply(cfg);
    const ExperimentResult result = run_and_write(cfg, out_dir, o.threads);
    write_summary(out, result);
    return kExitOk;
}

int cmd_scenarios(const std::string& out_dir, const Overrides& o, std::ostream& out) {
    make_output_dir(out_dir);
    std::ostringstream summary;
    summary << "scenario,variance_mode,step_size,atc_iterations,silms_iterations,ratio,"
               "reduction_percent,atc_steady_mse_db,silms_steady_mse_db\n";
    char buf[256];
    for (ExperimentConfig cfg : reference_scenarios()) {
        o.apply(cfg);
        const ExperimentResult r = run_and_write(cfg, fs::path(out_dir) / cfg.name, o.threads);
        const auto* atc = r.find(Algorithm::ATC);
        const auto* si = r.find(Algorithm::SILMS);
        auto iters = [](const AlgorithmResult* a) {
            return a->iterations_to_threshold ? std::to_string(*a->iterations_to_threshold)
                                              : std::string("not-reached");
        };
        std::string ratio = "n/a", reduction = "n/a";
        if (auto q = silms_atc_ratio(r)) {
            std::snprintf(buf, sizeof buf, "%.4f", *q);
            ratio = buf;
            std::snprintf(buf, sizeof buf, "%.2f", 100.0 * (1.0 - *q));
            reduction = buf;
        }
        std::snprintf(buf, sizeof buf, "%s,%s,%g,%s,%s,%s,%s,%.4f,%.4f\n", cfg.name.c_str(),
                      std::string(variance_mode_name(cfg.variance_mode)).c_str(), cfg.step_size,
                      iters(atc).c_str(), iters(si).c_str(), ratio.c_str(), reduction.c_str(),
                      atc->steady_state_mse_db, si->steady_state_mse_db);
        summary << buf;
    }
    std::ofstream f(fs::path(out_dir) / "summary.txt", std::ios::binary);
    if (!f) throw Error("cannot write summary in '" + out_dir + "'");
    f << summary.str();
    out << summary.str();
    return kExitOk;
}

int cmd_validate_combiner(const std::string& graph_path, const std::string& rule_text,
                          const std::optional<std::string>& out_dir, std::ostream& out) {
    CombinerRule rule;
    try {
        rule = parse_rule(rule_text);
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
    const Graph g = load_graph(graph_path);
    const CombinationMatrix m = make_combiner(rule, g);
    if (out_dir) {
        make_output_dir(*out_dir);
        std::ofstream f(fs::path(*out_dir) / "combiner.csv", std::ios::binary);
        if (!f) throw Error("cannot write combiner.csv");
        write_matrix_csv(f, m);
    }
    auto violation = validate(m, g);
    if (!violation && rule == CombinerRule::Metropolis) violation = check_doubly_stochastic(m);
    out << "rule=" << rule_name(rule) << '\n' << "nodes=" << g.size() << '\n';
    if (violation) {
        out << "status=invalid\n" << "violation=" << violation->describe() << '\n';
        return kExitRuntime;
    }
    out << "status=ok\n";
    return kExitOk;
}

int cmd_cost(const std::string& graph_path, const std::string& algorithm_text, long long m,
             std::ostream& out) {
    if (m <= 0) throw UsageError("--filter-length must be a positive integer");
    Algorithm algorithm;
    try {
        algorithm = parse_algorithm(algorithm_text);
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
    const Graph g = load_graph(graph_path);
    out << "algorithm=" << algorithm_name(algorithm) << '\n';
    write_cost_report(out, cost_report(algorithm, g, static_cast<std::size_t>(m)));
    return kExitOk;
}

int cmd_graph_gen(std::size_t nodes, double radius, std::uint64_t seed, const std::string& out_dir,
                  std::ostream& out) {
    if (nodes == 0) throw UsageError("--nodes must be positive");
    if (!(radius > 0.0 && radius <= std::sqrt(2.0))) throw UsageError("--radius must lie in (0, sqrt(2)]");
    const Graph g = random_geometric_graph(nodes, radius, seed);
    make_output_dir(out_dir);
    std::ofstream f(fs::path(out_dir) / "graph.edges", std::ios::binary);
    if (!f) throw Error("cannot write graph.edges");
    f << "# random geometric graph, radius " << radius << ", seed " << seed << '\n';
    write_edge_list(f, g);
    out << "nodes=" << g.size() << '\n' << "edges=" << g.edges().size() << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Diffusion LMS simulator: ATC, CTA and serial-inspired SI-LMS over graphs", "difflms"};
    app.require_subcommand(1, 1);

    Overrides overrides;
    std::string config_path, out_dir, graph_path, rule, algorithm;
    long long filter_length = 0;
    std::size_t nodes = 20;
    double radius = kDefaultGraphRadius;
    std::uint64_t gen_seed = 1;

    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--seed", overrides.seed, "Override the master seed");
        cmd->add_option("--runs", overrides.runs, "Override the number of Monte Carlo runs");
        cmd->add_option("--iterations", overrides.iterations, "Override the iterations per run");
        cmd->add_option("--threads", overrides.threads, "Worker threads (0 = hardware)");
    };

    auto* run = app.add_subcommand("run", "Run an experiment from a key=value config file");
    run->add_option("--config", config_path, "Config file")->required();
    run->add_option("--out", out_dir, "Output directory (parent must exist)")->required();
    add_overrides(run);

    auto* scenarios = app.add_subcommand("scenarios", "Run the three reference scenarios");
    scenarios->add_option("--out", out_dir, "Output directory (parent must exist)")->required();
    add_overrides(scenarios);

    std::optional<std::string> combiner_out;
    auto* validate_cmd = app.add_subcommand("validate-combiner", "Build and check a combination matrix");
    validate_cmd->add_option("--graph", graph_path, "Edge-list file")->required();
    validate_cmd->add_option("--rule", rule, "Combiner rule: " + valid_rule_names())->required();
    validate_cmd->add_option("--out", combiner_out, "Directory for combiner.csv");

    auto* cost = app.add_subcommand("cost", "Per-iteration cost of an algorithm beyond ATC");
    cost->add_option("--graph", graph_path, "Edge-list file")->required();
    cost->add_option("--algorithm", algorithm, "NoCoop, ATC, CTA or SILMS")->required();
    cost->add_option("--filter-length", filter_length, "Filter length M")->required();

    auto* graph_gen = app.add_subcommand("graph-gen", "Generate a connected random geometric graph");
    graph_gen->add_option("--out", out_dir, "Output directory for graph.edges")->required();
    graph_gen->add_option("--nodes", nodes, "Number of nodes");
    graph_gen->add_option("--radius", radius, "Connection radius in the unit square");
    graph_gen->add_option("--seed", gen_seed, "Placement seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*run) return cmd_run(config_path, out_dir, overrides, out);
        if (*scenarios) return cmd_scenarios(out_dir, overrides, out);
        if (*validate_cmd) return cmd_validate_combiner(graph_path, rule, combiner_out, out);
        if (*cost) return cmd_cost(graph_path, algorithm, filter_length, out);
        if (*graph_gen) return cmd_graph_gen(nodes, radius, gen_seed, out_dir, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace difflms
