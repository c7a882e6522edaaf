#ifndef CROWDREP_POPULATION_HPP
#define CROWDREP_POPULATION_HPP

#include "crowdrep/rng.hpp"
#include "crowdrep/types.hpp"

namespace crowdrep {

class Allocation;
class AnswerMatrix;

// All workers in class k behave exactly like the class representative:
// p_tw = pi_{t,k(w)}. Classes occupy contiguous worker index ranges.
Population make_deterministic_population(const ClassProfile& profile);

// Two worker types per class: type 1 with p = (1-x)*pi, type 2 with
// p = (1-x)*pi + x/2, drawn with probabilities 1-2*pi and 2*pi so that the
// class mean stays pi. The type is drawn once per worker per group of tasks
// sharing the same pi value for the worker's class, so a worker is
// consistently good or bad within a homogeneous task group. x=0 recovers the
// deterministic population, x=1 the hammer-spammer mixture.
Population make_bimodal_population(const ClassProfile& profile, double x, Rng& rng);

// Each worker gets a single task-independent error probability drawn
// uniformly on (0, 1/2]. All workers start in a single placeholder class.
Population make_uniform_population(int num_tasks, int num_workers, Rng& rng);

struct Classification {
    std::vector<int> class_of;      // worker -> class in 0..K-1
    std::vector<double> pi_hat;     // representative per class, (2k-1)/(4K) 1-based
};

// Simulate n_training answers per worker, quantize the empirical error rate
// into K uniform bins over [0, 1/2]. n_training = 0 assigns classes uniformly
// at random. Bin k (1-based) covers ((k-1)/(2K), k/(2K)], with an exact-zero
// estimate mapping to bin 1; representatives are the bin midpoints (2k-1)/(4K).
Classification estimate_and_classify(const Population& pop, long long n_training,
                                     int num_classes, Rng& rng);

// Quantization of the true error probabilities (the perfect-estimate limit).
Classification classify_exact(const Population& pop, int num_classes);

TaskTruths sample_truths(int num_tasks, Rng& rng);

AnswerMatrix sample_answers(const Population& pop, const Allocation& alloc,
                            const TaskTruths& truths, Rng& rng);

}  // namespace crowdrep

#endif  // CROWDREP_POPULATION_HPP
