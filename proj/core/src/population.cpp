#include "crowdrep/population.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "crowdrep/allocation.hpp"
#include "crowdrep/decision.hpp"

namespace crowdrep {

Population make_deterministic_population(const ClassProfile& profile) {
    profile.validate();
    const int T = profile.num_tasks;
    const int W = profile.total_workers();
    Population pop;
    pop.p = Matrix(static_cast<std::size_t>(T), static_cast<std::size_t>(W));
    pop.class_of = profile.contiguous_class_of();
    for (int t = 0; t < T; ++t)
        for (int w = 0; w < W; ++w)
            pop.p(t, w) = profile.pi(t, pop.class_of[static_cast<std::size_t>(w)]);
    return pop;
}

Population make_bimodal_population(const ClassProfile& profile, double x, Rng& rng) {
    profile.validate();
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("bimodal population: x must lie in [0, 1]");
    const int T = profile.num_tasks;
    const int W = profile.total_workers();
    Population pop;
    pop.p = Matrix(static_cast<std::size_t>(T), static_cast<std::size_t>(W));
    pop.class_of = profile.contiguous_class_of();
    for (int w = 0; w < W; ++w) {
        const int k = pop.class_of[static_cast<std::size_t>(w)];
        // One type draw per distinct pi value in the worker's class column.
        std::map<double, bool> type2_of_group;
        for (int t = 0; t < T; ++t) {
            const double pi = profile.pi(t, k);
            auto it = type2_of_group.find(pi);
            if (it == type2_of_group.end())
                it = type2_of_group.emplace(pi, rng.bernoulli(2.0 * pi)).first;
            pop.p(t, w) = it->second ? (1.0 - x) * pi + 0.5 * x : (1.0 - x) * pi;
        }
    }
    return pop;
}

Population make_uniform_population(int num_tasks, int num_workers, Rng& rng) {
    if (num_tasks < 1 || num_workers < 1)
        throw std::invalid_argument("uniform population: need T >= 1 and W >= 1");
    Population pop;
    pop.p = Matrix(static_cast<std::size_t>(num_tasks), static_cast<std::size_t>(num_workers));
    pop.class_of.assign(static_cast<std::size_t>(num_workers), 0);
    for (int w = 0; w < num_workers; ++w) {
        // Uniform on (0, 1/2]: half minus a draw on [0, 1/2).
        const double pw = 0.5 - 0.5 * rng.uniform();
        for (int t = 0; t < num_tasks; ++t) pop.p(t, w) = pw;
    }
    return pop;
}

namespace {

int quantize_class(double p_hat, int num_classes) {
    // Bin k (1-based) is ((k-1)/(2K), k/(2K)]; an exact zero maps to bin 1.
    if (p_hat <= 0.0) return 0;
    int k = static_cast<int>(std::ceil(p_hat * 2.0 * num_classes));
    return std::clamp(k, 1, num_classes) - 1;
}

}  // namespace

Classification estimate_and_classify(const Population& pop, long long n_training,
                                     int num_classes, Rng& rng) {
    if (num_classes < 1) throw std::invalid_argument("estimate_and_classify: K >= 1");
    Classification out;
    out.class_of.resize(static_cast<std::size_t>(pop.num_workers()));
    out.pi_hat.resize(static_cast<std::size_t>(num_classes));
    for (int k = 0; k < num_classes; ++k)
        out.pi_hat[static_cast<std::size_t>(k)] = (2.0 * (k + 1) - 1.0) / (4.0 * num_classes);
    for (int w = 0; w < pop.num_workers(); ++w) {
        if (n_training == 0) {
            out.class_of[static_cast<std::size_t>(w)] =
                static_cast<int>(rng.below(static_cast<std::size_t>(num_classes)));
            continue;
        }
        const double pw = pop.p(0, w);
        long long errors = 0;
        for (long long i = 0; i < n_training; ++i)
            if (rng.bernoulli(pw)) ++errors;
        double p_hat = static_cast<double>(errors) / static_cast<double>(n_training);
        p_hat = std::clamp(p_hat, 0.0, 0.5);
        out.class_of[static_cast<std::size_t>(w)] = quantize_class(p_hat, num_classes);
    }
    return out;
}

Classification classify_exact(const Population& pop, int num_classes) {
    if (num_classes < 1) throw std::invalid_argument("classify_exact: K >= 1");
    Classification out;
    out.class_of.resize(static_cast<std::size_t>(pop.num_workers()));
    out.pi_hat.resize(static_cast<std::size_t>(num_classes));
    for (int k = 0; k < num_classes; ++k)
        out.pi_hat[static_cast<std::size_t>(k)] = (2.0 * (k + 1) - 1.0) / (4.0 * num_classes);
    for (int w = 0; w < pop.num_workers(); ++w)
        out.class_of[static_cast<std::size_t>(w)] = quantize_class(pop.p(0, w), num_classes);
    return out;
}

TaskTruths sample_truths(int num_tasks, Rng& rng) {
    TaskTruths truths;
    truths.tau.resize(static_cast<std::size_t>(num_tasks));
    for (auto& v : truths.tau) v = rng.sign();
    return truths;
}

AnswerMatrix sample_answers(const Population& pop, const Allocation& alloc,
                            const TaskTruths& truths, Rng& rng) {
    if (alloc.num_tasks() > pop.num_tasks() || alloc.num_workers() > pop.num_workers())
        throw std::invalid_argument("sample_answers: allocation exceeds population dimensions");
    if (static_cast<int>(truths.tau.size()) != pop.num_tasks())
        throw std::invalid_argument("sample_answers: truths size mismatch");
    AnswerMatrix answers(pop.num_tasks(), pop.num_workers());
    for (const auto& [t, w] : alloc.pairs()) {
        const int tau = truths.tau[static_cast<std::size_t>(t)];
        answers.add(t, w, rng.bernoulli(pop.p(t, w)) ? -tau : tau);
    }
    return answers;
}

}  // namespace crowdrep
