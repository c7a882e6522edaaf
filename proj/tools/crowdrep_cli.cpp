// Command-line front end: run preset scenarios or custom configs, select
// allocation/decision strategies and parameter sweeps, and emit CSV files.
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdrep/harness.hpp"

namespace {

using namespace crowdrep;

std::string strategy_help() {
    std::string out = "Strategy tokens (<allocator>:<decider>):\n  allocators:";
    for (const auto& t : allocator_tokens()) out += " " + t;
    out += "\n  deciders:  ";
    for (const auto& t : decider_tokens()) out += " " + t;
    return out;
}

Scenario resolve_scenario(const std::string& preset, const std::string& config) {
    if (!preset.empty() && !config.empty())
        throw std::invalid_argument("use either --scenario or --config, not both");
    if (!preset.empty()) return scenario_preset(preset);
    if (!config.empty()) return load_scenario_config(config);
    throw std::invalid_argument("one of --scenario or --config is required");
}

std::vector<StrategySpec> resolve_strategies(const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw std::invalid_argument("at least one --strategy is required");
    std::vector<StrategySpec> out;
    for (const auto& t : tokens) out.push_back(parse_strategy(t));
    return out;
}

void report(const ExperimentResult& result, const std::string& out_path) {
    if (!out_path.empty()) write_results(result, out_path);
    const std::size_t last = result.sweep_values.size() - 1;
    for (std::size_t s = 0; s < result.strategies.size(); ++s)
        std::printf("%-40s %s=%-8g P_e = %.6g (+-%.3g)\n", result.strategies[s].c_str(),
                    result.sweep_name.c_str(), result.sweep_values[last],
                    result.p_e(last, s), result.half_width(last, s));
}

const char* model_name(WorkerModel m) {
    switch (m) {
        case WorkerModel::Deterministic: return "deterministic";
        case WorkerModel::Bimodal: return "bimodal";
        case WorkerModel::UniformIndividual: return "uniform";
    }
    return "?";
}

void print_scenario(const Scenario& s) {
    std::printf("%s: T=%d, model=%s, r_w=%d", s.name.c_str(), s.num_tasks,
                model_name(s.model), s.worker_limit);
    if (s.model == WorkerModel::UniformIndividual) {
        std::printf(", W=%d, K=%d, training=%lld\n", s.total_workers,
                    s.quantization_classes, static_cast<long long>(s.training_tasks));
        return;
    }
    std::printf(", W=(");
    for (std::size_t k = 0; k < s.class_sizes.size(); ++k)
        std::printf("%s%d", k ? "," : "", s.class_sizes[k]);
    std::printf(")");
    for (int g = 0; g < s.num_groups(); ++g) {
        std::printf(", group%d[%d tasks] pi=(", g + 1, s.group_sizes[static_cast<std::size_t>(g)]);
        for (std::size_t k = 0; k < s.pi.cols(); ++k)
            std::printf("%s%g", k ? "," : "", s.pi(static_cast<std::size_t>(g), k));
        std::printf(")");
    }
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reputation-aware task assignment and decision experiments"};
    app.footer(strategy_help());
    app.require_subcommand(1);

    std::string preset, config, sweep_text, out_path;
    std::vector<std::string> strategy_tokens;
    long long trials = 2000;
    std::uint64_t seed = 1;
    double beta = 10.0;
    int threads = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", preset, "Preset scenario name (s1..s4)");
        cmd->add_option("--config", config, "Scenario config file");
        cmd->add_option("--strategy", strategy_tokens,
                        "Strategy token <allocator>:<decider> (repeatable)");
        cmd->add_option("--trials", trials, "Monte Carlo trials per point")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
        cmd->add_option("--out", out_path, "Output CSV path");
        cmd->add_option("--threads", threads, "Worker threads")->capture_default_str();
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Run strategies at a fixed beta");
    add_common(run_cmd);
    run_cmd->add_option("--beta", beta, "Workers per task, C = beta*T")
        ->capture_default_str();

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep a parameter");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--sweep", sweep_text,
                          "Sweep spec: beta=2:20:2 | x=0:1:0.1 | K=1,3,6,9 | "
                          "training=0,10,100,1000")
        ->required();
    sweep_cmd->add_option("--beta", beta, "Base beta for non-beta sweeps")
        ->capture_default_str();

    CLI::App* presets_cmd = app.add_subcommand("presets", "List the preset scenarios");
    CLI::App* validate_cmd = app.add_subcommand("validate", "Check a scenario config");
    validate_cmd->add_option("--config", config, "Scenario config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        SweepOptions options;
        options.threads = threads;
        options.base_beta = beta;
        if (presets_cmd->parsed()) {
            for (const Scenario& s : scenario_presets()) print_scenario(s);
            return 0;
        }
        if (validate_cmd->parsed()) {
            const Scenario s = load_scenario_config(config);
            print_scenario(s);
            return 0;
        }
        const Scenario scenario = resolve_scenario(preset, config);
        const std::vector<StrategySpec> strategies = resolve_strategies(strategy_tokens);
        SweepSpec sweep;
        if (run_cmd->parsed()) {
            sweep.variable = SweepVariable::Beta;
            sweep.values = {beta};
        } else {
            sweep = parse_sweep(sweep_text);
        }
        const ExperimentResult result =
            run_sweep(scenario, strategies, sweep, trials, seed, options);
        report(result, out_path);
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
