#ifndef CROWDREP_DECISION_HPP
#define CROWDREP_DECISION_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crowdrep/rng.hpp"
#include "crowdrep/types.hpp"

namespace crowdrep {

class Allocation;

// Sparse T x W matrix of answers in {-1, +1}, with the sparsity pattern of
// the allocation it was sampled from.
class AnswerMatrix {
public:
    AnswerMatrix() : num_tasks_(0), num_workers_(0) {}
    AnswerMatrix(int num_tasks, int num_workers)
        : num_tasks_(num_tasks),
          num_workers_(num_workers),
          by_task_(static_cast<std::size_t>(num_tasks)),
          by_worker_(static_cast<std::size_t>(num_workers)) {}

    int num_tasks() const { return num_tasks_; }
    int num_workers() const { return num_workers_; }

    void add(int t, int w, int a) {
        by_task_[static_cast<std::size_t>(t)].emplace_back(w, a);
        by_worker_[static_cast<std::size_t>(w)].emplace_back(t, a);
        ++count_;
    }

    // (worker, answer) pairs for a task.
    const std::vector<std::pair<int, int>>& row(int t) const {
        return by_task_[static_cast<std::size_t>(t)];
    }
    // (task, answer) pairs for a worker.
    const std::vector<std::pair<int, int>>& column(int w) const {
        return by_worker_[static_cast<std::size_t>(w)];
    }
    std::size_t size() const { return count_; }

private:
    int num_tasks_, num_workers_;
    std::size_t count_ = 0;
    std::vector<std::vector<std::pair<int, int>>> by_task_;
    std::vector<std::vector<std::pair<int, int>>> by_worker_;
};

struct DecisionResult {
    std::vector<int> estimates;      // in {-1, +1}
    std::vector<double> scores;      // LLR or LRA score
    std::vector<bool> tie_broken;    // true iff the score was 0

    std::string to_csv() const;      // task, estimate, score, tie_broken
};

enum class MpPrior { MaxEntropy, Haldane };

struct MpConfig {
    int iterations = 10;
    MpPrior prior = MpPrior::MaxEntropy;
    int quadrature_nodes = 64;
    double lambda_tolerance = 1e-10;
};

// Majority voting; zero-sum rows (including empty ones) are broken uniformly
// at random.
DecisionResult decide_majority(const AnswerMatrix& answers, Rng& rng);

// MAP for known class reputations: LLR_t = sum_w a_tw * ln((1-pi)/pi) with
// pi = pi_{t,k(w)}. Throws if any pi used is below 1e-9 (callers clamp).
DecisionResult decide_map(const AnswerMatrix& answers, const std::vector<int>& class_of,
                          const Matrix& pi, Rng& rng);

// Oracle bound: the same LLR weighted by the true p_tw (clamped to >= 1e-9).
DecisionResult decide_oracle_map(const AnswerMatrix& answers, const Population& pop,
                                 Rng& rng);

// Answers weighted by the leading right singular vector of the dense +-1/0
// matrix, computed by power iteration on A^T A (all-ones start, direction
// tolerance 1e-10, at most 1000 iterations), sign fixed so sum_w v_w >= 0.
DecisionResult decide_lra(const AnswerMatrix& answers, Rng& rng);

// LRA applied independently to each row block, restricted to the workers
// active in that block. task_groups are [begin, end) index ranges
// partitioning 0..T.
DecisionResult decide_lra_blocks(const AnswerMatrix& answers,
                                 const std::vector<std::pair<int, int>>& task_groups,
                                 Rng& rng);

// lambda of the max-entropy density ~ exp(lambda*p) on [0, 1/2] whose mean is
// pi; bisection on [-1e4, 1e4].
double solve_lambda(double pi, double tolerance = 1e-10);

// Sum-product message passing with per-class priors on the worker error
// probability. Assumes p_tw = p_w, so pi is one value per class. Flooding
// schedule; the decision uses the output LLR of the final iteration.
DecisionResult decide_mp(const AnswerMatrix& answers, const std::vector<int>& class_of,
                         const std::vector<double>& pi, const MpConfig& cfg, Rng& rng);

// Message passing under the two-point Haldane prior (p = 0 or 1 with equal
// weight); the posterior-mean integral degenerates to a two-term sum.
DecisionResult decide_mp_haldane(const AnswerMatrix& answers,
                                 const std::vector<int>& class_of, const MpConfig& cfg,
                                 Rng& rng);

}  // namespace crowdrep

#endif  // CROWDREP_DECISION_HPP
