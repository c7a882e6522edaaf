#include "crowdrep/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "crowdrep/population.hpp"

namespace crowdrep {

int Scenario::num_workers() const {
    if (model == WorkerModel::UniformIndividual) return total_workers;
    return std::accumulate(class_sizes.begin(), class_sizes.end(), 0);
}

std::vector<std::pair<int, int>> Scenario::task_groups() const {
    std::vector<std::pair<int, int>> out;
    int begin = 0;
    for (int size : group_sizes) {
        out.emplace_back(begin, begin + size);
        begin += size;
    }
    return out;
}

ClassProfile Scenario::profile(long long budget) const {
    if (model == WorkerModel::UniformIndividual)
        throw std::logic_error("Scenario::profile: class sizes are per-trial under the "
                               "individual worker model");
    const int K = num_classes();
    Matrix full(static_cast<std::size_t>(num_tasks), static_cast<std::size_t>(K));
    int t = 0;
    for (int g = 0; g < num_groups(); ++g)
        for (int i = 0; i < group_sizes[static_cast<std::size_t>(g)]; ++i, ++t)
            for (int k = 0; k < K; ++k)
                full(static_cast<std::size_t>(t), static_cast<std::size_t>(k)) =
                    pi(static_cast<std::size_t>(g), static_cast<std::size_t>(k));
    return make_profile(num_tasks, class_sizes, std::move(full), worker_limit, budget);
}

void Scenario::validate() const {
    if (num_tasks < 1) throw std::invalid_argument("scenario: need at least one task");
    if (group_sizes.empty()) throw std::invalid_argument("scenario: no task groups");
    int total = 0;
    for (int s : group_sizes) {
        if (s < 1) throw std::invalid_argument("scenario: group sizes must be positive");
        total += s;
    }
    if (total != num_tasks)
        throw std::invalid_argument("scenario: group sizes must sum to the task count");
    if (worker_limit < 0) throw std::invalid_argument("scenario: negative worker limit");
    if (model == WorkerModel::UniformIndividual) {
        if (total_workers < 1) throw std::invalid_argument("scenario: need workers > 0");
        if (quantization_classes < 1)
            throw std::invalid_argument("scenario: need at least one class");
    } else {
        if (class_sizes.empty()) throw std::invalid_argument("scenario: no classes");
        for (int s : class_sizes)
            if (s < 0) throw std::invalid_argument("scenario: negative class size");
        if (pi.rows() != group_sizes.size() || pi.cols() != class_sizes.size())
            throw std::invalid_argument("scenario: pi table must be groups x classes");
        for (double v : pi.data())
            if (!(v >= 0.0 && v <= 0.5))
                throw std::invalid_argument("scenario: pi entries must lie in [0, 1/2]");
    }
    if (!(bimodal_x >= 0.0 && bimodal_x <= 1.0))
        throw std::invalid_argument("scenario: x must lie in [0, 1]");
}

namespace {

const std::vector<std::pair<std::string, std::pair<AllocatorKind, ObjectiveKind>>>&
allocator_table() {
    static const std::vector<std::pair<std::string, std::pair<AllocatorKind, ObjectiveKind>>>
        table = {
            {"uniform", {AllocatorKind::Uniform, ObjectiveKind::AvgMutualInfo}},
            {"greedy-mi", {AllocatorKind::Greedy, ObjectiveKind::AvgMutualInfo}},
            {"greedy-ep", {AllocatorKind::Greedy, ObjectiveKind::AvgErrorProb}},
            {"greedy-chernoff", {AllocatorKind::Greedy, ObjectiveKind::AvgChernoff}},
            {"greedy-maxmin-mi", {AllocatorKind::Greedy, ObjectiveKind::MinMutualInfo}},
            {"greedy-maxmin-ep", {AllocatorKind::Greedy, ObjectiveKind::MaxErrorProb}},
            {"greedy-maxmin-chernoff", {AllocatorKind::Greedy, ObjectiveKind::MaxChernoff}},
        };
    return table;
}

const std::vector<std::pair<std::string, DeciderKind>>& decider_table() {
    static const std::vector<std::pair<std::string, DeciderKind>> table = {
        {"majority", DeciderKind::Majority}, {"map", DeciderKind::Map},
        {"omap", DeciderKind::OracleMap},    {"lra", DeciderKind::Lra},
        {"lra-blocks", DeciderKind::LraBlocks}, {"mp", DeciderKind::Mp},
        {"mp-haldane", DeciderKind::MpHaldane},
    };
    return table;
}

}  // namespace

std::vector<std::string> allocator_tokens() {
    std::vector<std::string> out;
    for (const auto& [name, kinds] : allocator_table()) out.push_back(name);
    return out;
}

std::vector<std::string> decider_tokens() {
    std::vector<std::string> out;
    for (const auto& [name, kind] : decider_table()) out.push_back(name);
    return out;
}

StrategySpec parse_strategy(const std::string& token) {
    const auto colon = token.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("strategy '" + token +
                                    "': expected <allocator>:<decider>");
    const std::string alloc = token.substr(0, colon);
    const std::string decider = token.substr(colon + 1);
    StrategySpec spec;
    spec.token = token;
    bool found = false;
    for (const auto& [name, kinds] : allocator_table())
        if (name == alloc) {
            spec.allocator = kinds.first;
            spec.objective = kinds.second;
            found = true;
            break;
        }
    if (!found) throw std::invalid_argument("unknown allocator token '" + alloc + "'");
    found = false;
    for (const auto& [name, kind] : decider_table())
        if (name == decider) {
            spec.decider = kind;
            found = true;
            break;
        }
    if (!found) throw std::invalid_argument("unknown decider token '" + decider + "'");
    if (spec.decider == DeciderKind::MpHaldane) spec.mp.prior = MpPrior::Haldane;
    return spec;
}

std::string SweepSpec::variable_name() const {
    switch (variable) {
        case SweepVariable::Beta: return "beta";
        case SweepVariable::X: return "x";
        case SweepVariable::K: return "K";
        case SweepVariable::Training: return "training";
    }
    return "?";
}

SweepSpec parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("sweep '" + text + "': expected <variable>=<values>");
    const std::string var = text.substr(0, eq);
    const std::string values = text.substr(eq + 1);
    SweepSpec spec;
    if (var == "beta")
        spec.variable = SweepVariable::Beta;
    else if (var == "x")
        spec.variable = SweepVariable::X;
    else if (var == "K")
        spec.variable = SweepVariable::K;
    else if (var == "training")
        spec.variable = SweepVariable::Training;
    else
        throw std::invalid_argument("unknown sweep variable '" + var + "'");

    if (values.find(',') != std::string::npos || values.find(':') == std::string::npos) {
        std::stringstream in(values);
        std::string item;
        while (std::getline(in, item, ','))
            spec.values.push_back(std::stod(item));
    } else {
        double start, stop, step;
        char c1, c2;
        std::stringstream in(values);
        if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':')
            throw std::invalid_argument("sweep '" + text + "': malformed range");
        if (step <= 0.0)
            throw std::invalid_argument("sweep '" + text + "': step must be positive");
        for (double v = start; v <= stop + 1e-12; v += step) spec.values.push_back(v);
    }
    if (spec.values.empty())
        throw std::invalid_argument("sweep '" + text + "': empty value list");
    return spec;
}

namespace {

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Restrict the answer matrix to rows [begin, end), renumbered from 0.
AnswerMatrix restrict_rows(const AnswerMatrix& answers, int begin, int end) {
    AnswerMatrix sub(end - begin, answers.num_workers());
    for (int t = begin; t < end; ++t)
        for (const auto& [w, a] : answers.row(t)) sub.add(t - begin, w, a);
    return sub;
}

struct AllocationCache {
    std::mutex mutex;
    std::map<std::string, Allocation> entries;
};

AllocationCache& allocation_cache() {
    static AllocationCache cache;
    return cache;
}

// Greedy allocation for the canonical contiguous class numbering, memoized:
// the result depends only on the profile and objective, both of which repeat
// across trials.
Allocation cached_greedy(const ClassProfile& profile, ObjectiveKind kind) {
    std::ostringstream key;
    key << static_cast<int>(kind) << '|' << profile.num_tasks << '|' << profile.budget
        << '|' << profile.worker_limits[0];
    for (int s : profile.class_sizes) key << '|' << s;
    key << '#';
    for (double v : profile.pi.data()) key << format_g6(v) << ',';
    const std::string k = key.str();

    auto& cache = allocation_cache();
    {
        std::lock_guard<std::mutex> lock(cache.mutex);
        auto it = cache.entries.find(k);
        if (it != cache.entries.end()) return it->second;
    }
    Allocation alloc = greedy_allocate(profile, kind);
    std::lock_guard<std::mutex> lock(cache.mutex);
    if (cache.entries.size() >= 1024) cache.entries.clear();
    return cache.entries.emplace(k, std::move(alloc)).first->second;
}

}  // namespace

std::vector<std::uint8_t> run_trial(const Scenario& scenario, const StrategySpec& strategy,
                                    long long budget, std::uint64_t seed) {
    scenario.validate();
    if ((strategy.decider == DeciderKind::LraBlocks) && scenario.num_groups() < 2)
        throw std::invalid_argument("strategy '" + strategy.token +
                                    "' requires a scenario with at least two task groups");
    const int T = scenario.num_tasks;
    const int W = scenario.num_workers();
    if (budget < 0 || budget > static_cast<long long>(W) * scenario.worker_limit)
        throw std::invalid_argument("budget exceeds total worker capacity");

    Rng rng(seed);
    TaskTruths truths = sample_truths(T, rng);

    // Population and requester-side class view.
    Population pop;
    std::vector<int> class_of;       // worker -> class, as seen by the requester
    std::vector<int> class_sizes;
    Matrix pi_rows;                  // groups x K
    const int K = scenario.num_classes();
    if (scenario.model == WorkerModel::UniformIndividual) {
        pop = make_uniform_population(T, W, rng);
        const Classification cls =
            scenario.training_tasks < 0
                ? classify_exact(pop, K)
                : estimate_and_classify(pop, scenario.training_tasks, K, rng);
        class_of = cls.class_of;
        class_sizes.assign(static_cast<std::size_t>(K), 0);
        for (int k : class_of) ++class_sizes[static_cast<std::size_t>(k)];
        pi_rows = Matrix(1, static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) pi_rows(0, static_cast<std::size_t>(k)) = cls.pi_hat[static_cast<std::size_t>(k)];
    } else {
        const ClassProfile base = scenario.profile(budget);
        pop = scenario.model == WorkerModel::Bimodal
                  ? make_bimodal_population(base, scenario.bimodal_x, rng)
                  : make_deterministic_population(base);
        class_of = base.contiguous_class_of();
        class_sizes = scenario.class_sizes;
        pi_rows = scenario.pi;
    }

    // Class-level pi table expanded to T rows (what the requester knows).
    Matrix pi_full(static_cast<std::size_t>(T), static_cast<std::size_t>(K));
    {
        int t = 0;
        const std::size_t groups = pi_rows.rows();
        for (std::size_t g = 0; g < groups; ++g) {
            const int size = groups == 1 ? T : scenario.group_sizes[g];
            for (int i = 0; i < size; ++i, ++t)
                for (int k = 0; k < K; ++k)
                    pi_full(static_cast<std::size_t>(t), static_cast<std::size_t>(k)) =
                        pi_rows(g, static_cast<std::size_t>(k));
        }
    }
    const ClassProfile profile =
        make_profile(T, class_sizes, pi_full, scenario.worker_limit, budget);

    Allocation alloc;
    if (strategy.allocator == AllocatorKind::Uniform) {
        alloc = uniform_allocate(profile, rng);
    } else {
        alloc = cached_greedy(profile, strategy.objective);
        if (scenario.model == WorkerModel::UniformIndividual) {
            // The cached allocation uses contiguous class numbering; map its
            // worker slots onto this trial's class members.
            std::vector<int> perm(static_cast<std::size_t>(W));
            std::vector<int> offset(static_cast<std::size_t>(K), 0);
            for (int k = 1; k < K; ++k)
                offset[static_cast<std::size_t>(k)] =
                    offset[static_cast<std::size_t>(k - 1)] +
                    class_sizes[static_cast<std::size_t>(k - 1)];
            for (int w = 0; w < W; ++w)
                perm[static_cast<std::size_t>(
                    offset[static_cast<std::size_t>(class_of[static_cast<std::size_t>(w)])]++)] = w;
            alloc = alloc.permute_workers(perm);
        }
    }
    if (!is_feasible(alloc, profile))
        throw std::runtime_error("allocation violates the assignment constraints");

    const AnswerMatrix answers = sample_answers(pop, alloc, truths, rng);

    // Clamp zero reputations before log weighting.
    Matrix pi_dec = pi_full;
    for (std::size_t t = 0; t < pi_dec.rows(); ++t)
        for (std::size_t k = 0; k < pi_dec.cols(); ++k)
            pi_dec(t, k) = std::max(pi_dec(t, k), 1e-9);

    DecisionResult decision;
    switch (strategy.decider) {
        case DeciderKind::Majority:
            decision = decide_majority(answers, rng);
            break;
        case DeciderKind::Map:
            decision = decide_map(answers, class_of, pi_dec, rng);
            break;
        case DeciderKind::OracleMap:
            decision = decide_oracle_map(answers, pop, rng);
            break;
        case DeciderKind::Lra:
            decision = decide_lra(answers, rng);
            break;
        case DeciderKind::LraBlocks:
            decision = decide_lra_blocks(answers, scenario.task_groups(), rng);
            break;
        case DeciderKind::Mp:
        case DeciderKind::MpHaldane: {
            // Run one independent instance per task group: group reputations
            // differ, and the MP model assumes a worker's error probability is
            // constant across the tasks it sees.
            decision.estimates.resize(static_cast<std::size_t>(T));
            decision.scores.resize(static_cast<std::size_t>(T));
            decision.tie_broken.resize(static_cast<std::size_t>(T));
            int g = 0;
            for (const auto& [begin, end] : scenario.task_groups()) {
                const AnswerMatrix sub = restrict_rows(answers, begin, end);
                std::vector<double> pi_k(static_cast<std::size_t>(K));
                for (int k = 0; k < K; ++k)
                    pi_k[static_cast<std::size_t>(k)] =
                        std::max(pi_rows(pi_rows.rows() == 1 ? 0 : static_cast<std::size_t>(g),
                                         static_cast<std::size_t>(k)),
                                 1e-9);
                const DecisionResult part =
                    strategy.decider == DeciderKind::Mp
                        ? decide_mp(sub, class_of, pi_k, strategy.mp, rng)
                        : decide_mp_haldane(sub, class_of, strategy.mp, rng);
                for (int t = begin; t < end; ++t) {
                    decision.estimates[static_cast<std::size_t>(t)] =
                        part.estimates[static_cast<std::size_t>(t - begin)];
                    decision.scores[static_cast<std::size_t>(t)] =
                        part.scores[static_cast<std::size_t>(t - begin)];
                    decision.tie_broken[static_cast<std::size_t>(t)] =
                        part.tie_broken[static_cast<std::size_t>(t - begin)];
                }
                ++g;
            }
            break;
        }
    }

    std::vector<std::uint8_t> errors(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t)
        errors[static_cast<std::size_t>(t)] =
            decision.estimates[static_cast<std::size_t>(t)] !=
            truths.tau[static_cast<std::size_t>(t)];
    return errors;
}

std::string ExperimentResult::to_csv() const {
    std::ostringstream out;
    out << "sweep_value, strategy, p_e, ci_halfwidth, n_trials, seed\n";
    for (std::size_t i = 0; i < sweep_values.size(); ++i)
        for (std::size_t s = 0; s < strategies.size(); ++s)
            out << format_g6(sweep_values[i]) << ", " << strategies[s] << ", "
                << format_g6(p_e(i, s)) << ", " << format_g6(half_width(i, s)) << ", "
                << n_trials << ", " << master_seed << '\n';
    return out.str();
}

ExperimentResult parse_results_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        line != "sweep_value, strategy, p_e, ci_halfwidth, n_trials, seed")
        throw std::invalid_argument("results CSV: bad header");
    struct Row {
        double value;
        std::string strategy;
        double p_e, hw;
        long long trials;
        std::uint64_t seed;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Row r;
        std::string field;
        auto next = [&]() {
            if (!std::getline(ls, field, ',')) throw std::invalid_argument("results CSV: short row");
            const auto b = field.find_first_not_of(' ');
            const auto e = field.find_last_not_of(' ');
            field = field.substr(b, e - b + 1);
        };
        next(); r.value = std::stod(field);
        next(); r.strategy = field;
        next(); r.p_e = std::stod(field);
        next(); r.hw = std::stod(field);
        next(); r.trials = std::stoll(field);
        next(); r.seed = std::stoull(field);
        rows.push_back(std::move(r));
    }
    ExperimentResult result;
    if (rows.empty()) {
        result.p_e = Matrix(0, 0);
        result.half_width = Matrix(0, 0);
        return result;
    }
    for (const Row& r : rows) {
        if (result.sweep_values.empty() || result.sweep_values.back() != r.value)
            if (std::find(result.sweep_values.begin(), result.sweep_values.end(), r.value) ==
                result.sweep_values.end())
                result.sweep_values.push_back(r.value);
        if (std::find(result.strategies.begin(), result.strategies.end(), r.strategy) ==
            result.strategies.end())
            result.strategies.push_back(r.strategy);
    }
    result.n_trials = rows[0].trials;
    result.master_seed = rows[0].seed;
    result.p_e = Matrix(result.sweep_values.size(), result.strategies.size());
    result.half_width = Matrix(result.sweep_values.size(), result.strategies.size());
    for (const Row& r : rows) {
        const auto i = static_cast<std::size_t>(
            std::find(result.sweep_values.begin(), result.sweep_values.end(), r.value) -
            result.sweep_values.begin());
        const auto s = static_cast<std::size_t>(
            std::find(result.strategies.begin(), result.strategies.end(), r.strategy) -
            result.strategies.begin());
        result.p_e(i, s) = r.p_e;
        result.half_width(i, s) = r.hw;
    }
    return result;
}

void write_results(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << result.to_csv();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

ExperimentResult run_sweep(const Scenario& scenario,
                           const std::vector<StrategySpec>& strategies,
                           const SweepSpec& sweep, long long n_trials,
                           std::uint64_t master_seed, const SweepOptions& options) {
    if (n_trials < 1) throw std::invalid_argument("run_sweep: need at least one trial");
    if (strategies.empty()) throw std::invalid_argument("run_sweep: no strategies");
    scenario.validate();
    if (sweep.variable == SweepVariable::X && scenario.model != WorkerModel::Bimodal)
        throw std::invalid_argument("x sweep requires the bimodal worker model");
    if ((sweep.variable == SweepVariable::K || sweep.variable == SweepVariable::Training) &&
        scenario.model != WorkerModel::UniformIndividual)
        throw std::invalid_argument("K/training sweeps require the individual worker model");

    ExperimentResult result;
    result.sweep_name = sweep.variable_name();
    result.sweep_values = sweep.values;
    for (const StrategySpec& s : strategies) result.strategies.push_back(s.token);
    result.n_trials = n_trials;
    result.master_seed = master_seed;
    result.p_e = Matrix(sweep.values.size(), strategies.size());
    result.half_width = Matrix(sweep.values.size(), strategies.size());

    const int threads = std::max(1, options.threads);
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
        const double value = sweep.values[i];
        Scenario variant = scenario;
        long long budget = std::llround(options.base_beta * scenario.num_tasks);
        switch (sweep.variable) {
            case SweepVariable::Beta:
                budget = std::llround(value * scenario.num_tasks);
                break;
            case SweepVariable::X:
                variant.bimodal_x = value;
                break;
            case SweepVariable::K:
                variant.quantization_classes = static_cast<int>(std::llround(value));
                break;
            case SweepVariable::Training:
                variant.training_tasks = std::llround(value);
                break;
        }
        for (std::size_t s = 0; s < strategies.size(); ++s) {
            std::vector<long long> counts(static_cast<std::size_t>(threads), 0);
            std::vector<std::exception_ptr> failures(static_cast<std::size_t>(threads));
            auto work = [&](int tid) {
                try {
                    long long local = 0;
                    for (long long j = tid; j < n_trials; j += threads) {
                        const std::uint64_t seed = derive_seed(
                            master_seed, {static_cast<std::uint64_t>(i),
                                          static_cast<std::uint64_t>(s),
                                          static_cast<std::uint64_t>(j)});
                        const auto errors = run_trial(variant, strategies[s], budget, seed);
                        for (std::uint8_t e : errors) local += e;
                    }
                    counts[static_cast<std::size_t>(tid)] = local;
                } catch (...) {
                    failures[static_cast<std::size_t>(tid)] = std::current_exception();
                }
            };
            if (threads == 1) {
                work(0);
            } else {
                std::vector<std::thread> pool;
                for (int tid = 0; tid < threads; ++tid) pool.emplace_back(work, tid);
                for (auto& t : pool) t.join();
            }
            for (const auto& f : failures)
                if (f) std::rethrow_exception(f);
            const double n = static_cast<double>(n_trials) * scenario.num_tasks;
            const double pe =
                static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0LL)) / n;
            result.p_e(i, s) = pe;
            result.half_width(i, s) = 3.0 * std::sqrt(pe * (1.0 - pe) / n);
        }
    }
    return result;
}

std::vector<Scenario> scenario_presets() {
    std::vector<Scenario> out;
    {
        Scenario s;
        s.name = "s1";
        s.num_tasks = 100;
        s.group_sizes = {100};
        s.class_sizes = {30, 120, 150};
        s.pi = Matrix(1, 3);
        s.pi(0, 0) = 0.1; s.pi(0, 1) = 0.2; s.pi(0, 2) = 0.5;
        s.model = WorkerModel::Bimodal;  // x = 0 reduces to the deterministic model
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "s2";
        s.num_tasks = 100;
        s.group_sizes = {50, 50};
        s.class_sizes = {30, 120, 150};
        s.pi = Matrix(2, 3);
        s.pi(0, 0) = 0.05; s.pi(0, 1) = 0.1; s.pi(0, 2) = 0.5;
        s.pi(1, 0) = 0.1;  s.pi(1, 1) = 0.2; s.pi(1, 2) = 0.5;
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "s3";
        s.num_tasks = 100;
        s.group_sizes = {50, 50};
        s.class_sizes = {40, 120, 40};
        s.pi = Matrix(2, 3);
        s.pi(0, 0) = 0.1; s.pi(0, 1) = 0.2; s.pi(0, 2) = 0.5;
        s.pi(1, 0) = 0.5; s.pi(1, 1) = 0.2; s.pi(1, 2) = 0.1;
        out.push_back(std::move(s));
    }
    {
        Scenario s;
        s.name = "s4";
        s.num_tasks = 100;
        s.group_sizes = {100};
        s.model = WorkerModel::UniformIndividual;
        s.total_workers = 90;
        s.quantization_classes = 3;
        s.training_tasks = -1;
        out.push_back(std::move(s));
    }
    return out;
}

Scenario scenario_preset(const std::string& name) {
    for (Scenario& s : scenario_presets())
        if (s.name == name) return s;
    throw std::invalid_argument("unknown scenario preset '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(std::stod(trim(item)));
    return out;
}

}  // namespace

Scenario parse_scenario_config(const std::string& text) {
    Scenario scenario;
    scenario.name = "custom";
    std::vector<std::vector<double>> group_pi;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scenario" && section != "classes" && section != "groups")
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (section == "scenario") {
                if (key == "name") scenario.name = value;
                else if (key == "tasks") scenario.num_tasks = std::stoi(value);
                else if (key == "worker_limit") scenario.worker_limit = std::stoi(value);
                else if (key == "x") scenario.bimodal_x = std::stod(value);
                else if (key == "workers") scenario.total_workers = std::stoi(value);
                else if (key == "quantization")
                    scenario.quantization_classes = std::stoi(value);
                else if (key == "training") scenario.training_tasks = std::stoll(value);
                else if (key == "model") {
                    if (value == "deterministic") scenario.model = WorkerModel::Deterministic;
                    else if (value == "bimodal") scenario.model = WorkerModel::Bimodal;
                    else if (value == "uniform")
                        scenario.model = WorkerModel::UniformIndividual;
                    else throw std::invalid_argument("unknown worker model '" + value + "'");
                } else
                    throw std::invalid_argument("unknown key '" + key + "'");
            } else if (section == "classes") {
                if (key == "sizes") {
                    scenario.class_sizes.clear();
                    for (double v : parse_list(value))
                        scenario.class_sizes.push_back(static_cast<int>(std::llround(v)));
                } else
                    throw std::invalid_argument("unknown key '" + key + "'");
            } else if (section == "groups") {
                if (key == "sizes") {
                    scenario.group_sizes.clear();
                    for (double v : parse_list(value))
                        scenario.group_sizes.push_back(static_cast<int>(std::llround(v)));
                } else if (key == "pi") {
                    group_pi.push_back(parse_list(value));
                } else
                    throw std::invalid_argument("unknown key '" + key + "'");
            } else {
                throw std::invalid_argument("key outside any section");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " +
                                        e.what());
        }
    }
    if (scenario.group_sizes.empty() && scenario.num_tasks > 0)
        scenario.group_sizes = {scenario.num_tasks};
    if (!group_pi.empty()) {
        const std::size_t K = group_pi[0].size();
        scenario.pi = Matrix(group_pi.size(), K);
        for (std::size_t g = 0; g < group_pi.size(); ++g) {
            if (group_pi[g].size() != K)
                throw std::invalid_argument("config: pi rows have unequal lengths");
            for (std::size_t k = 0; k < K; ++k) scenario.pi(g, k) = group_pi[g][k];
        }
    }
    scenario.validate();
    return scenario;
}

Scenario load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_config(buf.str());
}

}  // namespace crowdrep
