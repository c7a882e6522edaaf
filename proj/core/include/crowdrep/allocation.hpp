#ifndef CROWDREP_ALLOCATION_HPP
#define CROWDREP_ALLOCATION_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "crowdrep/rng.hpp"
#include "crowdrep/types.hpp"

namespace crowdrep {

// A set of (task, worker) assignment pairs with O(1) membership and
// per-worker load tracking.
class Allocation {
public:
    Allocation() : num_tasks_(0), num_workers_(0) {}
    Allocation(int num_tasks, int num_workers)
        : num_tasks_(num_tasks),
          num_workers_(num_workers),
          incidence_(static_cast<std::size_t>(num_tasks) * num_workers, 0),
          loads_(static_cast<std::size_t>(num_workers), 0),
          workers_of_task_(static_cast<std::size_t>(num_tasks)) {}

    int num_tasks() const { return num_tasks_; }
    int num_workers() const { return num_workers_; }

    bool has(int t, int w) const {
        return incidence_[static_cast<std::size_t>(t) * num_workers_ + w] != 0;
    }

    // Returns false (and does nothing) on a duplicate pair.
    bool add(int t, int w) {
        auto& cell = incidence_[static_cast<std::size_t>(t) * num_workers_ + w];
        if (cell) return false;
        cell = 1;
        pairs_.emplace_back(t, w);
        ++loads_[static_cast<std::size_t>(w)];
        workers_of_task_[static_cast<std::size_t>(t)].push_back(w);
        return true;
    }

    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    const std::vector<int>& loads() const { return loads_; }
    const std::vector<int>& workers_of(int t) const {
        return workers_of_task_[static_cast<std::size_t>(t)];
    }
    std::size_t size() const { return pairs_.size(); }

    // Weight matrix D = {d_tk}: assignments of task t to class-k workers.
    IntMatrix weight_matrix(const std::vector<int>& class_of, int num_classes) const;

    // Remap worker indices through a permutation (new_w = perm[old_w]).
    Allocation permute_workers(const std::vector<int>& perm) const;

private:
    int num_tasks_, num_workers_;
    std::vector<std::uint8_t> incidence_;
    std::vector<int> loads_;
    std::vector<std::vector<int>> workers_of_task_;
    std::vector<std::pair<int, int>> pairs_;
};

enum class ObjectiveKind {
    AvgErrorProb,    // Phi_1 = -(1/T) sum_t P_{e,t}
    AvgChernoff,     // Phi_2 = -(1/T) sum_t Phat_{e,t}
    AvgMutualInfo,   // Phi_3 = sum_t I(a_t; tau_t)
    MaxErrorProb,    // Phi_4 = -max_t P_{e,t}
    MaxChernoff,     // Phi_5 = -max_t Phat_{e,t}
    MinMutualInfo,   // Phi_6 = min_t I(a_t; tau_t)
};

// Feasibility against the matroid constraints: no duplicate pairs (holds by
// Allocation construction), per-worker loads within limits, budget respected,
// indices in range.
bool is_feasible(const Allocation& alloc, const ClassProfile& profile);

// I(a_t; tau_t) in bits for a task assigned d_k workers of class k, computed
// by exact enumeration of per-class answer counts. Cost is prod_k (d_k + 1).
double task_mutual_information(const std::vector<int>& d, const std::vector<double>& pi);

// Exact MAP-decoding error probability for one task; LLR ties count 1/2.
double task_error_probability(const std::vector<int>& d, const std::vector<double>& pi);

// Chernoff-style pessimistic bound exp(-[sum d(1-2pi)z] / [sum (dz)^2]),
// z = ln((1-pi)/pi). Returns 1 when the denominator vanishes, 0 when a
// perfect class (pi = 0) is assigned.
double task_chernoff_bound(const std::vector<int>& d, const std::vector<double>& pi);

// Total probability mass of the enumerated answer-count patterns (= 1).
double pattern_probability_sum(const std::vector<int>& d, const std::vector<double>& pi);

double evaluate_objective(ObjectiveKind kind, const IntMatrix& weights, const Matrix& pi);

// Greedy maximization of the objective under the matroid constraints.
// Candidates are generated per (task, class) over the weight matrix; ties
// break to the lowest task index, then lowest class index. The final weight
// matrix is realized on concrete workers afterwards (largest residual load
// first, deterministic hash tie-break). Requires a uniform per-worker limit.
// Deterministic.
//
// class_of maps workers to classes; empty means the canonical contiguous
// numbering derived from profile.class_sizes.
Allocation greedy_allocate(const ClassProfile& profile, ObjectiveKind kind,
                           const std::vector<int>& class_of = {});

// Class-blind random regular bipartite graph: ceil(C/r) workers drawn
// uniformly, r tasks per selected worker (fewer on the last for rounding),
// task degrees in {floor(C/T), ceil(C/T)}. Retries stub matchings that
// produce duplicate edges up to 100 times, then throws.
Allocation uniform_allocate(const ClassProfile& profile, Rng& rng);

// Text edge list export, one `t w` pair per line (0-based).
std::string to_edge_list(const Allocation& alloc);

// D-matrix CSV export for inspection.
std::string to_weight_csv(const IntMatrix& weights);

}  // namespace crowdrep

#endif  // CROWDREP_ALLOCATION_HPP
