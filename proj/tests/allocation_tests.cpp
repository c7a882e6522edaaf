#include <doctest.h>

#include <cmath>
#include <vector>

#include "crowdrep/allocation.hpp"
#include "crowdrep/harness.hpp"
#include "oracles.hpp"

using namespace crowdrep;

namespace {

Matrix row_matrix(const std::vector<double>& row, int rows = 1) {
    Matrix m(static_cast<std::size_t>(rows), row.size());
    for (int r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < row.size(); ++c)
            m(static_cast<std::size_t>(r), c) = row[c];
    return m;
}

IntMatrix weights_from(const std::vector<std::vector<int>>& rows) {
    IntMatrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

// Build an allocation from a bitmask over the T*W pair grid (row-major).
Allocation alloc_from_mask(unsigned mask, int T, int W) {
    Allocation alloc(T, W);
    for (int t = 0; t < T; ++t)
        for (int w = 0; w < W; ++w)
            if (mask & (1u << (t * W + w))) alloc.add(t, w);
    return alloc;
}

}  // namespace

TEST_CASE("task mutual information matches the pinned values") {
    CHECK(task_mutual_information({1}, {0.5}) == 0.0);
    const double expected1 = 1.0 - oracles::binary_entropy(0.1);
    CHECK(task_mutual_information({1}, {0.1}) ==
          doctest::Approx(expected1).epsilon(1e-12));
    CHECK(task_mutual_information({1}, {0.1}) == doctest::Approx(0.53100).epsilon(1e-4));
    CHECK(task_mutual_information({2}, {0.1}) == doctest::Approx(0.7421).epsilon(1e-3));
    CHECK(task_mutual_information({0, 0}, {0.1, 0.3}) == 0.0);
    // Degenerate perfect class: one answer pins the truth, I = 1 bit.
    CHECK(task_mutual_information({1}, {0.0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("task mutual information equals raw brute-force enumeration") {
    Rng rng(101);
    for (int i = 0; i < 100; ++i) {
        const int K = 1 + static_cast<int>(rng.below(3));
        std::vector<int> d(K);
        std::vector<double> pi(K);
        int total = 0;
        for (int k = 0; k < K; ++k) {
            d[k] = static_cast<int>(rng.below(4));
            total += d[k];
            pi[k] = 0.02 + 0.48 * rng.uniform();
        }
        if (total == 0 || total > 10) continue;
        CHECK(task_mutual_information(d, pi) ==
              doctest::Approx(oracles::brute_mutual_information(d, pi)).epsilon(1e-10));
    }
}

TEST_CASE("task error probability matches the pinned values") {
    CHECK(task_error_probability({1}, {0.5}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(task_error_probability({3}, {0.1}) == doctest::Approx(0.028).epsilon(1e-12));
    CHECK(task_error_probability({2}, {0.1}) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("count-enumeration error probability equals 2^n brute force") {
    Rng rng(103);
    int tested = 0;
    while (tested < 100) {
        const int K = 1 + static_cast<int>(rng.below(3));
        std::vector<int> d(K);
        std::vector<double> pi(K);
        int total = 0;
        for (int k = 0; k < K; ++k) {
            d[k] = static_cast<int>(rng.below(5));
            total += d[k];
            pi[k] = 0.02 + 0.48 * rng.uniform();
        }
        if (total == 0 || total > 10) continue;
        ++tested;
        CHECK(task_error_probability(d, pi) ==
              doctest::Approx(oracles::brute_error_probability(d, pi)).epsilon(1e-10));
    }
}

TEST_CASE("pattern probabilities sum to one") {
    Rng rng(107);
    for (int i = 0; i < 100; ++i) {
        const int K = 1 + static_cast<int>(rng.below(3));
        std::vector<int> d(K);
        std::vector<double> pi(K);
        for (int k = 0; k < K; ++k) {
            d[k] = static_cast<int>(rng.below(8));
            pi[k] = 0.5 * rng.uniform();
        }
        CHECK(std::abs(pattern_probability_sum(d, pi) - 1.0) <= 1e-12);
    }
}

TEST_CASE("chernoff bound matches the printed formula") {
    CHECK(task_chernoff_bound({1}, {0.1}) ==
          doctest::Approx(std::exp(-0.8 / std::log(9.0))).epsilon(1e-12));
    CHECK(task_chernoff_bound({1}, {0.1}) == doctest::Approx(0.6948).epsilon(1e-3));
    CHECK(task_chernoff_bound({5}, {0.5}) == 1.0);
    CHECK(task_chernoff_bound({0, 0}, {0.1, 0.2}) == 1.0);
    CHECK(task_chernoff_bound({2}, {0.0}) == 0.0);  // perfect worker assigned
}

TEST_CASE("objective evaluation combines the per-task terms") {
    const Matrix pi = row_matrix({0.1, 0.5}, 2);
    const IntMatrix zero = weights_from({{0, 0}, {0, 0}});
    CHECK(evaluate_objective(ObjectiveKind::AvgMutualInfo, zero, pi) == 0.0);
    CHECK(evaluate_objective(ObjectiveKind::AvgErrorProb, zero, pi) ==
          doctest::Approx(-0.5).epsilon(1e-12));

    // Row 0 has one reliable answer, row 1 one spammer answer: min MI is 0.
    const IntMatrix mixed = weights_from({{1, 0}, {0, 1}});
    CHECK(evaluate_objective(ObjectiveKind::MinMutualInfo, mixed, pi) == 0.0);
    CHECK(evaluate_objective(ObjectiveKind::AvgMutualInfo, mixed, pi) ==
          doctest::Approx(1.0 - oracles::binary_entropy(0.1)).epsilon(1e-12));
}

TEST_CASE("average and worst-case objectives agree on single-task instances") {
    const Matrix pi = row_matrix({0.15, 0.35});
    const IntMatrix d = weights_from({{2, 3}});
    CHECK(evaluate_objective(ObjectiveKind::AvgErrorProb, d, pi) ==
          doctest::Approx(evaluate_objective(ObjectiveKind::MaxErrorProb, d, pi)));
    CHECK(evaluate_objective(ObjectiveKind::AvgChernoff, d, pi) ==
          doctest::Approx(evaluate_objective(ObjectiveKind::MaxChernoff, d, pi)));
    CHECK(evaluate_objective(ObjectiveKind::AvgMutualInfo, d, pi) ==
          doctest::Approx(evaluate_objective(ObjectiveKind::MinMutualInfo, d, pi)));
}

TEST_CASE("feasibility checks the matroid constraints") {
    const ClassProfile profile = make_profile(2, {3}, row_matrix({0.2}, 2), 2, 3);

    CHECK(is_feasible(Allocation(2, 3), profile));  // empty set is feasible

    Allocation dup(2, 3);
    CHECK(dup.add(0, 1));
    CHECK_FALSE(dup.add(0, 1));  // duplicate pairs are rejected at insertion

    Allocation over_budget(2, 3);
    over_budget.add(0, 0);
    over_budget.add(0, 1);
    over_budget.add(1, 0);
    over_budget.add(1, 1);  // |pairs| = 4 > C = 3
    CHECK_FALSE(is_feasible(over_budget, profile));

    Allocation over_load(2, 3);
    over_load.add(0, 0);
    over_load.add(1, 0);
    CHECK(is_feasible(over_load, profile));
    ClassProfile tight = profile;
    tight.worker_limits.assign(3, 1);
    CHECK_FALSE(is_feasible(over_load, tight));  // load 2 > r = 1
}

TEST_CASE("mutual information is monotone and submodular in the assignment counts") {
    Rng rng(109);
    for (int i = 0; i < 1000; ++i) {
        const int K = 1 + static_cast<int>(rng.below(3));
        std::vector<double> pi(K);
        std::vector<int> d1(K), d2(K);
        for (int k = 0; k < K; ++k) {
            pi[k] = 0.02 + 0.48 * rng.uniform();
            d1[k] = static_cast<int>(rng.below(4));
            d2[k] = static_cast<int>(rng.below(static_cast<std::size_t>(d1[k]) + 1));
        }
        const int e = static_cast<int>(rng.below(static_cast<std::size_t>(K)));
        std::vector<int> d1e = d1, d2e = d2;
        ++d1e[e];
        ++d2e[e];
        const double i1 = task_mutual_information(d1, pi);
        const double i2 = task_mutual_information(d2, pi);
        const double i1e = task_mutual_information(d1e, pi);
        const double i2e = task_mutual_information(d2e, pi);
        CHECK(i1e >= i1 - 1e-12);                    // monotone
        CHECK(i2e - i2 >= (i1e - i1) - 1e-12);       // diminishing returns
    }
}

TEST_CASE("matroid exchange holds on an exhaustive small instance") {
    const int T = 2, W = 4;
    const ClassProfile profile = make_profile(T, {2, 2}, row_matrix({0.1, 0.3}, T), 2, 5);
    std::vector<unsigned> feasible;
    for (unsigned mask = 0; mask < (1u << (T * W)); ++mask)
        if (is_feasible(alloc_from_mask(mask, T, W), profile)) feasible.push_back(mask);
    REQUIRE(feasible.size() > 1);
    for (unsigned g : feasible)
        for (unsigned h : feasible) {
            if (__builtin_popcount(g) <= __builtin_popcount(h)) continue;
            bool found = false;
            for (int bit = 0; bit < T * W && !found; ++bit) {
                const unsigned e = 1u << bit;
                if ((g & e) && !(h & e) &&
                    is_feasible(alloc_from_mask(h | e, T, W), profile))
                    found = true;
            }
            CHECK(found);
        }
}

TEST_CASE("greedy achieves at least half the brute-force optimum") {
    Rng rng(113);
    int tested = 0;
    while (tested < 200) {
        const int T = 1 + static_cast<int>(rng.below(3));
        const int K = 1 + static_cast<int>(rng.below(2));
        std::vector<int> sizes(K);
        int W = 0;
        for (int k = 0; k < K; ++k) {
            sizes[k] = 1 + static_cast<int>(rng.below(2));
            W += sizes[k];
        }
        if (T * W > 12) continue;
        Matrix pi(static_cast<std::size_t>(T), static_cast<std::size_t>(K));
        for (int t = 0; t < T; ++t)
            for (int k = 0; k < K; ++k)
                pi(static_cast<std::size_t>(t), static_cast<std::size_t>(k)) =
                    0.05 + 0.45 * rng.uniform();
        const int r = 1 + static_cast<int>(rng.below(2));
        const long long C = 1 + static_cast<long long>(rng.below(5));
        const ClassProfile profile = make_profile(T, sizes, pi, r, C);
        ++tested;

        const std::vector<int> class_of = profile.contiguous_class_of();
        double best = 0.0;
        for (unsigned mask = 0; mask < (1u << (T * W)); ++mask) {
            const Allocation alloc = alloc_from_mask(mask, T, W);
            if (!is_feasible(alloc, profile)) continue;
            best = std::max(best,
                            evaluate_objective(ObjectiveKind::AvgMutualInfo,
                                               alloc.weight_matrix(class_of, K), pi));
        }
        const Allocation greedy = greedy_allocate(profile, ObjectiveKind::AvgMutualInfo);
        REQUIRE(is_feasible(greedy, profile));
        const double value = evaluate_objective(ObjectiveKind::AvgMutualInfo,
                                                greedy.weight_matrix(class_of, K), pi);
        CHECK(value >= 0.5 * best - 1e-9);
    }
}

TEST_CASE("greedy reproduces the two-group assignment table") {
    const Scenario s3 = scenario_preset("s3");
    {
        const ClassProfile profile = s3.profile(10 * 100);
        const Allocation alloc = greedy_allocate(profile, ObjectiveKind::AvgMutualInfo);
        const IntMatrix d = alloc.weight_matrix(profile.contiguous_class_of(), 3);
        for (int t = 0; t < 50; ++t) {
            CHECK(d(t, 0) == 10);
            CHECK(d(t, 1) == 0);
            CHECK(d(t, 2) == 0);
        }
        for (int t = 50; t < 100; ++t) {
            CHECK(d(t, 0) == 0);
            CHECK(d(t, 1) == 0);
            CHECK(d(t, 2) == 10);
        }
    }
    {
        const ClassProfile profile = s3.profile(18 * 100);
        const Allocation alloc = greedy_allocate(profile, ObjectiveKind::AvgMutualInfo);
        const IntMatrix d = alloc.weight_matrix(profile.contiguous_class_of(), 3);
        // beta = 18 exceeds the 16-per-task capacity of the preferred class
        // (40 workers * 20 answers / 50 tasks), so the overflow lands on the
        // shared middle class.
        for (int t = 0; t < 50; ++t) {
            CHECK(d(t, 0) == 16);
            CHECK(d(t, 1) == 2);
            CHECK(d(t, 2) == 0);
        }
        for (int t = 50; t < 100; ++t) {
            CHECK(d(t, 0) == 0);
            CHECK(d(t, 1) == 2);
            CHECK(d(t, 2) == 16);
        }
    }
}

TEST_CASE("greedy degenerate cases") {
    const ClassProfile empty = make_profile(2, {3}, row_matrix({0.2}, 2), 20, 0);
    CHECK(greedy_allocate(empty, ObjectiveKind::AvgMutualInfo).size() == 0);

    const ClassProfile tiny = make_profile(1, {5}, row_matrix({0.1}), 20, 3);
    const Allocation alloc = greedy_allocate(tiny, ObjectiveKind::AvgMutualInfo);
    CHECK(alloc.size() == 3);
    const IntMatrix d = alloc.weight_matrix(tiny.contiguous_class_of(), 1);
    CHECK(d(0, 0) == 3);  // three distinct workers by the no-duplicate invariant
}

TEST_CASE("greedy is deterministic") {
    const Scenario s2 = scenario_preset("s2");
    const ClassProfile profile = s2.profile(700);
    const Allocation a = greedy_allocate(profile, ObjectiveKind::AvgMutualInfo);
    const Allocation b = greedy_allocate(profile, ObjectiveKind::AvgMutualInfo);
    CHECK(a.pairs() == b.pairs());
}

TEST_CASE("uniform allocation covers the complete regular case") {
    const ClassProfile profile = make_profile(5, {5}, row_matrix({0.2}, 5), 4, 20);
    Rng rng(127);
    const Allocation alloc = uniform_allocate(profile, rng);
    REQUIRE(alloc.size() == 20);
    for (int w = 0; w < 5; ++w) CHECK(alloc.loads()[static_cast<std::size_t>(w)] == 4);
    for (int t = 0; t < 5; ++t) CHECK(alloc.workers_of(t).size() == 4);
    CHECK(is_feasible(alloc, profile));
}

TEST_CASE("uniform allocation keeps task degrees within one of each other") {
    const ClassProfile profile = make_profile(7, {10}, row_matrix({0.2}, 7), 5, 23);
    Rng rng(131);
    for (int run = 0; run < 1000; ++run) {
        const Allocation alloc = uniform_allocate(profile, rng);
        REQUIRE(alloc.size() == 23);
        CHECK(is_feasible(alloc, profile));
        for (int t = 0; t < 7; ++t) {
            const std::size_t deg = alloc.workers_of(t).size();
            CHECK(deg >= 3);  // floor(23/7)
            CHECK(deg <= 4);  // ceil(23/7)
        }
    }
}

TEST_CASE("allocation exports are well formed") {
    Allocation alloc(2, 3);
    alloc.add(0, 2);
    alloc.add(1, 0);
    CHECK(to_edge_list(alloc) == "0 2\n1 0\n");
    const IntMatrix d = alloc.weight_matrix({0, 0, 1}, 2);
    CHECK(to_weight_csv(d) == "0,1\n1,0\n");
}
