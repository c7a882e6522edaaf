#ifndef CROWDREP_HARNESS_HPP
#define CROWDREP_HARNESS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crowdrep/allocation.hpp"
#include "crowdrep/decision.hpp"
#include "crowdrep/types.hpp"

namespace crowdrep {

enum class WorkerModel { Deterministic, Bimodal, UniformIndividual };

struct Scenario {
    std::string name;
    int num_tasks = 0;
    std::vector<int> group_sizes;   // task groups, sums to num_tasks
    std::vector<int> class_sizes;   // W_k; ignored for UniformIndividual
    Matrix pi;                      // groups x K class reputations
    WorkerModel model = WorkerModel::Deterministic;
    double bimodal_x = 0.0;         // hammer-spammer mixing for Bimodal
    int worker_limit = 20;          // r_w, common to all workers
    int total_workers = 0;          // W for UniformIndividual
    int quantization_classes = 3;   // K for UniformIndividual
    long long training_tasks = -1;  // -1 = perfect classification

    int num_groups() const { return static_cast<int>(group_sizes.size()); }
    int num_classes() const {
        return model == WorkerModel::UniformIndividual ? quantization_classes
                                                       : static_cast<int>(pi.cols());
    }
    int num_workers() const;
    std::vector<std::pair<int, int>> task_groups() const;  // [begin, end) ranges

    // Requester-side profile with the group pi table expanded to T rows.
    // For UniformIndividual the pi table is the K quantization representatives
    // and class sizes must be supplied by the caller (they vary per trial).
    ClassProfile profile(long long budget) const;

    void validate() const;
};

enum class AllocatorKind { Uniform, Greedy };
enum class DeciderKind { Majority, Map, OracleMap, Lra, LraBlocks, Mp, MpHaldane };

struct StrategySpec {
    AllocatorKind allocator = AllocatorKind::Uniform;
    ObjectiveKind objective = ObjectiveKind::AvgMutualInfo;  // Greedy only
    DeciderKind decider = DeciderKind::Majority;
    MpConfig mp;
    std::string token;  // canonical "<allocator>:<decider>"
};

// Parses "<allocator>:<decider>" with allocator in {uniform, greedy-mi,
// greedy-ep, greedy-chernoff, greedy-maxmin-mi, greedy-maxmin-ep,
// greedy-maxmin-chernoff} and decider in {majority, map, omap, lra,
// lra-blocks, mp, mp-haldane}. Throws std::invalid_argument naming the
// offending token.
StrategySpec parse_strategy(const std::string& token);
std::vector<std::string> allocator_tokens();
std::vector<std::string> decider_tokens();

enum class SweepVariable { Beta, X, K, Training };

struct SweepSpec {
    SweepVariable variable = SweepVariable::Beta;
    std::vector<double> values;

    std::string variable_name() const;
};

// Parses "beta=2:20:2" (inclusive start:stop:step) or "K=1,3,6,9" style
// lists; variables: beta, x, K, training. Empty ranges are errors.
SweepSpec parse_sweep(const std::string& text);

struct ExperimentResult {
    std::string sweep_name;
    std::vector<double> sweep_values;
    std::vector<std::string> strategies;
    Matrix p_e;          // sweep points x strategies
    Matrix half_width;   // 3-sigma normal-approximation half-widths
    long long n_trials = 0;
    std::uint64_t master_seed = 0;

    std::string to_csv() const;
};

// Inverse of ExperimentResult::to_csv (within print precision).
ExperimentResult parse_results_csv(const std::string& text);

void write_results(const ExperimentResult& result, const std::string& path);

// One full pipeline: truths, population, (Scenario 4) classification,
// allocation from class-level information only, answers, decision. Returns
// the T-vector of error indicators.
std::vector<std::uint8_t> run_trial(const Scenario& scenario, const StrategySpec& strategy,
                                    long long budget, std::uint64_t seed);

struct SweepOptions {
    double base_beta = 10.0;  // budget for non-beta sweeps: C = base_beta * T
    int threads = 1;
};

ExperimentResult run_sweep(const Scenario& scenario,
                           const std::vector<StrategySpec>& strategies,
                           const SweepSpec& sweep, long long n_trials,
                           std::uint64_t master_seed, const SweepOptions& options = {});

// The four named presets (s1..s4).
std::vector<Scenario> scenario_presets();
Scenario scenario_preset(const std::string& name);

// Plain-text config with [scenario] / [classes] / [groups] sections.
Scenario parse_scenario_config(const std::string& text);
Scenario load_scenario_config(const std::string& path);

}  // namespace crowdrep

#endif  // CROWDREP_HARNESS_HPP
