#include "crowdrep/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace crowdrep {

IntMatrix Allocation::weight_matrix(const std::vector<int>& class_of, int num_classes) const {
    IntMatrix d(static_cast<std::size_t>(num_tasks_), static_cast<std::size_t>(num_classes));
    for (const auto& [t, w] : pairs_) ++d(t, class_of[static_cast<std::size_t>(w)]);
    return d;
}

Allocation Allocation::permute_workers(const std::vector<int>& perm) const {
    Allocation out(num_tasks_, num_workers_);
    for (const auto& [t, w] : pairs_) out.add(t, perm[static_cast<std::size_t>(w)]);
    return out;
}

bool is_feasible(const Allocation& alloc, const ClassProfile& profile) {
    if (alloc.num_tasks() > profile.num_tasks ||
        alloc.num_workers() > profile.total_workers())
        throw std::invalid_argument("is_feasible: allocation indices out of range");
    if (static_cast<long long>(alloc.size()) > profile.budget) return false;
    for (int w = 0; w < alloc.num_workers(); ++w)
        if (alloc.loads()[static_cast<std::size_t>(w)] >
            profile.worker_limits[static_cast<std::size_t>(w)])
            return false;
    return true;
}

namespace {

constexpr double kLogTieTol = 1e-9;

// Visit every per-class count vector m, 0 <= m_k <= d_k.
template <typename F>
void for_each_count_vector(const std::vector<int>& d, F&& visit) {
    std::vector<int> m(d.size(), 0);
    for (;;) {
        visit(m);
        std::size_t k = 0;
        while (k < d.size() && m[k] == d[k]) m[k++] = 0;
        if (k == d.size()) return;
        ++m[k];
    }
}

struct PatternTables {
    // pow_err[k][j] = pi_k^j, pow_ok[k][j] = (1-pi_k)^j, binom[k][j] = C(d_k, j)
    std::vector<std::vector<double>> pow_err, pow_ok, binom;

    PatternTables(const std::vector<int>& d, const std::vector<double>& pi) {
        const std::size_t K = d.size();
        pow_err.resize(K);
        pow_ok.resize(K);
        binom.resize(K);
        for (std::size_t k = 0; k < K; ++k) {
            const int dk = d[k];
            pow_err[k].resize(static_cast<std::size_t>(dk) + 1);
            pow_ok[k].resize(static_cast<std::size_t>(dk) + 1);
            binom[k].resize(static_cast<std::size_t>(dk) + 1);
            pow_err[k][0] = pow_ok[k][0] = binom[k][0] = 1.0;
            for (int j = 1; j <= dk; ++j) {
                pow_err[k][static_cast<std::size_t>(j)] =
                    pow_err[k][static_cast<std::size_t>(j) - 1] * pi[k];
                pow_ok[k][static_cast<std::size_t>(j)] =
                    pow_ok[k][static_cast<std::size_t>(j) - 1] * (1.0 - pi[k]);
                binom[k][static_cast<std::size_t>(j)] =
                    binom[k][static_cast<std::size_t>(j) - 1] * (dk - j + 1) / j;
            }
        }
    }

    // Probability of one raw answer vector with m_k wrong answers per class,
    // conditioned on tau = +1 (q1) and tau = -1 (q2); c = number of raw
    // vectors sharing the count pattern.
    void eval(const std::vector<int>& d, const std::vector<int>& m, double& q1,
              double& q2, double& c) const {
        q1 = q2 = c = 1.0;
        for (std::size_t k = 0; k < d.size(); ++k) {
            const auto mk = static_cast<std::size_t>(m[k]);
            const auto rk = static_cast<std::size_t>(d[k] - m[k]);
            q1 *= pow_err[k][mk] * pow_ok[k][rk];
            q2 *= pow_err[k][rk] * pow_ok[k][mk];
            c *= binom[k][mk];
        }
    }
};

double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

std::vector<double> llr_weights(const std::vector<double>& pi) {
    std::vector<double> z(pi.size());
    for (std::size_t k = 0; k < pi.size(); ++k) {
        const double p = std::max(pi[k], 1e-12);
        z[k] = std::log((1.0 - p) / p);
    }
    return z;
}

void check_inputs(const std::vector<int>& d, const std::vector<double>& pi) {
    if (d.size() != pi.size())
        throw std::invalid_argument("per-task inputs: d and pi size mismatch");
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (d[k] < 0) throw std::invalid_argument("per-task inputs: negative count");
        if (!(pi[k] >= 0.0 && pi[k] <= 0.5))
            throw std::invalid_argument("per-task inputs: pi outside [0, 1/2]");
    }
}

}  // namespace

double task_mutual_information(const std::vector<int>& d, const std::vector<double>& pi) {
    check_inputs(d, pi);
    const PatternTables tables(d, pi);
    double entropy_answers = 0.0;
    for_each_count_vector(d, [&](const std::vector<int>& m) {
        double q1, q2, c;
        tables.eval(d, m, q1, q2, c);
        const double prob = 0.5 * (q1 + q2);
        if (prob > 0.0) entropy_answers -= c * prob * std::log2(prob);
    });
    double conditional = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k)
        conditional += d[k] * binary_entropy(pi[k]);
    return entropy_answers - conditional;
}

double task_error_probability(const std::vector<int>& d, const std::vector<double>& pi) {
    check_inputs(d, pi);
    const PatternTables tables(d, pi);
    const std::vector<double> z = llr_weights(pi);
    double pe = 0.0;
    for_each_count_vector(d, [&](const std::vector<int>& m) {
        double llr = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) llr += (d[k] - 2 * m[k]) * z[k];
        double weight;
        if (llr < -kLogTieTol)
            weight = 1.0;
        else if (llr <= kLogTieTol)
            weight = 0.5;
        else
            return;
        double q1, q2, c;
        tables.eval(d, m, q1, q2, c);
        pe += weight * c * q1;
    });
    return pe;
}

double task_chernoff_bound(const std::vector<int>& d, const std::vector<double>& pi) {
    check_inputs(d, pi);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (d[k] == 0) continue;
        if (pi[k] == 0.0) return 0.0;  // perfect worker: bound 0 by limit
        const double z = std::log((1.0 - pi[k]) / pi[k]);
        num += d[k] * (1.0 - 2.0 * pi[k]) * z;
        den += (d[k] * z) * (d[k] * z);
    }
    if (den == 0.0) return 1.0;
    return std::exp(-num / den);
}

double pattern_probability_sum(const std::vector<int>& d, const std::vector<double>& pi) {
    check_inputs(d, pi);
    const PatternTables tables(d, pi);
    double total = 0.0;
    for_each_count_vector(d, [&](const std::vector<int>& m) {
        double q1, q2, c;
        tables.eval(d, m, q1, q2, c);
        total += c * 0.5 * (q1 + q2);
    });
    return total;
}

double evaluate_objective(ObjectiveKind kind, const IntMatrix& weights, const Matrix& pi) {
    if (weights.rows() != pi.rows() || weights.cols() != pi.cols())
        throw std::invalid_argument("evaluate_objective: D and pi dimensions mismatch");
    const std::size_t T = weights.rows();
    auto per_task = [&](std::size_t t) {
        const std::vector<int> d = weights.row(t);
        const std::vector<double> p = pi.row(t);
        switch (kind) {
            case ObjectiveKind::AvgErrorProb:
            case ObjectiveKind::MaxErrorProb:
                return task_error_probability(d, p);
            case ObjectiveKind::AvgChernoff:
            case ObjectiveKind::MaxChernoff:
                return task_chernoff_bound(d, p);
            case ObjectiveKind::AvgMutualInfo:
            case ObjectiveKind::MinMutualInfo:
                return task_mutual_information(d, p);
        }
        return 0.0;
    };
    switch (kind) {
        case ObjectiveKind::AvgErrorProb:
        case ObjectiveKind::AvgChernoff: {
            double sum = 0.0;
            for (std::size_t t = 0; t < T; ++t) sum += per_task(t);
            return T ? -sum / static_cast<double>(T) : 0.0;
        }
        case ObjectiveKind::AvgMutualInfo: {
            double sum = 0.0;
            for (std::size_t t = 0; t < T; ++t) sum += per_task(t);
            return sum;
        }
        case ObjectiveKind::MaxErrorProb:
        case ObjectiveKind::MaxChernoff: {
            double worst = 0.0;
            for (std::size_t t = 0; t < T; ++t) worst = std::max(worst, per_task(t));
            return -worst;
        }
        case ObjectiveKind::MinMutualInfo: {
            double least = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < T; ++t) least = std::min(least, per_task(t));
            return T ? least : 0.0;
        }
    }
    return 0.0;
}

namespace {

struct VectorHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = 1469598103934665603ULL;
        for (int x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b9;
            h *= 1099511628211ULL;
        }
        return h;
    }
};

bool is_min_kind(ObjectiveKind kind) {
    return kind == ObjectiveKind::AvgErrorProb || kind == ObjectiveKind::AvgChernoff ||
           kind == ObjectiveKind::MaxErrorProb || kind == ObjectiveKind::MaxChernoff;
}

bool is_maxmin_kind(ObjectiveKind kind) {
    return kind == ObjectiveKind::MaxErrorProb || kind == ObjectiveKind::MaxChernoff ||
           kind == ObjectiveKind::MinMutualInfo;
}

}  // namespace

Allocation greedy_allocate(const ClassProfile& profile, ObjectiveKind kind,
                           const std::vector<int>& class_of_arg) {
    profile.validate();
    const int T = profile.num_tasks;
    const int K = profile.num_classes;
    const int W = profile.total_workers();
    const std::vector<int> class_of =
        class_of_arg.empty() ? profile.contiguous_class_of() : class_of_arg;
    if (static_cast<int>(class_of.size()) != W)
        throw std::invalid_argument("greedy_allocate: class_of size mismatch");

    std::vector<std::vector<int>> workers_by_class(static_cast<std::size_t>(K));
    for (int w = 0; w < W; ++w)
        workers_by_class[static_cast<std::size_t>(class_of[static_cast<std::size_t>(w)])]
            .push_back(w);

    // Tasks with identical pi rows share cached per-task scores.
    std::vector<int> group_of(static_cast<std::size_t>(T));
    std::vector<std::vector<double>> group_pi;
    {
        std::unordered_map<std::string, int> seen;
        for (int t = 0; t < T; ++t) {
            const std::vector<double> row = profile.pi.row(static_cast<std::size_t>(t));
            std::string key(reinterpret_cast<const char*>(row.data()),
                            row.size() * sizeof(double));
            auto [it, inserted] = seen.emplace(key, static_cast<int>(group_pi.size()));
            if (inserted) group_pi.push_back(row);
            group_of[static_cast<std::size_t>(t)] = it->second;
        }
    }

    // Per-task raw score (MI, P_e or Chernoff bound) of a weight row, cached
    // by (group, row) so that identical tasks see bitwise-identical values
    // and ties stay exact.
    std::unordered_map<std::vector<int>, double, VectorHash> score_cache;
    auto row_score = [&](int t, const std::vector<int>& row) {
        std::vector<int> key;
        key.reserve(row.size() + 1);
        key.push_back(group_of[static_cast<std::size_t>(t)]);
        key.insert(key.end(), row.begin(), row.end());
        auto it = score_cache.find(key);
        if (it != score_cache.end()) return it->second;
        const std::vector<double>& p = group_pi[static_cast<std::size_t>(key[0])];
        double s;
        switch (kind) {
            case ObjectiveKind::AvgErrorProb:
            case ObjectiveKind::MaxErrorProb:
                s = task_error_probability(row, p);
                break;
            case ObjectiveKind::AvgChernoff:
            case ObjectiveKind::MaxChernoff:
                s = task_chernoff_bound(row, p);
                break;
            default:
                s = task_mutual_information(row, p);
                break;
        }
        score_cache.emplace(std::move(key), s);
        return s;
    };

    // The search runs purely over weight matrices D = {d_tk}: workers inside a
    // class are interchangeable, and with a common per-worker limit r a D is
    // realizable as a feasible pair set iff d_tk <= W_k and the per-class
    // totals stay within W_k * r (Gale-Ryser with uniform capacities). The
    // winning D is turned into concrete (task, worker) pairs afterwards.
    const int limit = profile.uniform_limit();
    std::vector<long long> class_used(static_cast<std::size_t>(K), 0);
    long long total_used = 0;

    std::vector<std::vector<int>> rows(static_cast<std::size_t>(T),
                                       std::vector<int>(static_cast<std::size_t>(K), 0));
    std::vector<double> value(static_cast<std::size_t>(T));
    Matrix cand(static_cast<std::size_t>(T), static_cast<std::size_t>(K));
    auto refresh_task = [&](int t) {
        value[static_cast<std::size_t>(t)] = row_score(t, rows[static_cast<std::size_t>(t)]);
        for (int k = 0; k < K; ++k) {
            auto& row = rows[static_cast<std::size_t>(t)];
            ++row[static_cast<std::size_t>(k)];
            cand(t, k) = row_score(t, row);
            --row[static_cast<std::size_t>(k)];
        }
    };
    for (int t = 0; t < T; ++t) refresh_task(t);

    // min-kinds: smaller per-task score is better (error probabilities).
    const double orient = is_min_kind(kind) ? -1.0 : 1.0;

    auto available = [&](int t, int k) {
        const auto sz = static_cast<long long>(workers_by_class[static_cast<std::size_t>(k)].size());
        return rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] < sz &&
               class_used[static_cast<std::size_t>(k)] < sz * limit;
    };

    const bool maxmin = is_maxmin_kind(kind);
    while (total_used < profile.budget) {
        // For max-min objectives the candidate key is the new bottleneck
        // value; for averages, the per-task improvement.
        double bottleneck_other = 0.0;
        int bottleneck_task = -1;
        double bottleneck_second = 0.0;
        if (maxmin) {
            double b1 = std::numeric_limits<double>::infinity();
            double b2 = b1;
            // Track the two smallest oriented values (worst tasks).
            for (int t = 0; t < T; ++t) {
                const double v = orient * value[static_cast<std::size_t>(t)];
                if (v < b1) {
                    b2 = b1;
                    b1 = v;
                    bottleneck_task = t;
                } else if (v < b2) {
                    b2 = v;
                }
            }
            bottleneck_other = b1;
            bottleneck_second = b2;
        }

        double best_key = -std::numeric_limits<double>::infinity();
        int best_t = -1, best_k = -1;
        for (int t = 0; t < T; ++t) {
            const double v = orient * value[static_cast<std::size_t>(t)];
            for (int k = 0; k < K; ++k) {
                const double cv = orient * cand(t, k);
                double key;
                if (maxmin) {
                    const double others =
                        (t == bottleneck_task) ? bottleneck_second : bottleneck_other;
                    key = std::min(others, cv);
                } else {
                    key = cv - v;
                }
                if (key > best_key) {
                    if (!available(t, k)) continue;
                    best_key = key;
                    best_t = t;
                    best_k = k;
                }
            }
        }
        if (best_t < 0) break;

        ++rows[static_cast<std::size_t>(best_t)][static_cast<std::size_t>(best_k)];
        ++class_used[static_cast<std::size_t>(best_k)];
        ++total_used;
        refresh_task(best_t);
    }

    // Realize D class by class with the Gale-Ryser construction: each task
    // takes its d_tk workers from those with the largest residual capacity,
    // which always succeeds under the selection-time constraints. Residual
    // ties are broken by a deterministic hash of (task, class, slot) rather
    // than by index: an index-ordered fill is periodic and splits blocks of
    // identical tasks into disconnected bipartite components, which cripples
    // spectral decision rules on the whole matrix. The hash yields a
    // quasi-random biregular graph, connected within each block for the
    // sizes used here.
    Allocation alloc(T, W);
    for (int k = 0; k < K; ++k) {
        const auto& members = workers_by_class[static_cast<std::size_t>(k)];
        const int n = static_cast<int>(members.size());
        std::vector<int> residual(static_cast<std::size_t>(n), limit);
        std::vector<char> picked(static_cast<std::size_t>(n), 0);
        for (int t = 0; t < T; ++t) {
            const int need = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
            if (need == 0) continue;
            std::fill(picked.begin(), picked.end(), 0);
            for (int slot = 0; slot < need; ++slot) {
                int best = 0, ties = 0;
                for (int i = 0; i < n; ++i) {
                    if (picked[static_cast<std::size_t>(i)]) continue;
                    const int res = residual[static_cast<std::size_t>(i)];
                    if (res > best) {
                        best = res;
                        ties = 1;
                    } else if (res == best && res > 0) {
                        ++ties;
                    }
                }
                if (best == 0)
                    throw std::logic_error("greedy_allocate: realization ran out of capacity");
                auto pick = derive_seed(0x5eedu, {static_cast<std::uint64_t>(t),
                                                  static_cast<std::uint64_t>(k),
                                                  static_cast<std::uint64_t>(slot)}) %
                            static_cast<std::uint64_t>(ties);
                for (int i = 0; i < n; ++i) {
                    if (picked[static_cast<std::size_t>(i)] ||
                        residual[static_cast<std::size_t>(i)] != best)
                        continue;
                    if (pick-- == 0) {
                        picked[static_cast<std::size_t>(i)] = 1;
                        --residual[static_cast<std::size_t>(i)];
                        alloc.add(t, members[static_cast<std::size_t>(i)]);
                        break;
                    }
                }
            }
        }
    }
    return alloc;
}

Allocation uniform_allocate(const ClassProfile& profile, Rng& rng) {
    profile.validate();
    const int T = profile.num_tasks;
    const int W = profile.total_workers();
    const int r = profile.uniform_limit();
    const long long C = profile.budget;
    long long capacity = 0;
    for (int rw : profile.worker_limits) capacity += rw;
    if (C > capacity)
        throw std::invalid_argument("uniform_allocate: budget exceeds total worker capacity");
    if (C == 0) return Allocation(T, W);
    if (r == 0) throw std::invalid_argument("uniform_allocate: zero per-worker limit");

    const int n_sel = static_cast<int>((C + r - 1) / r);
    const long long base = C / T;
    const int extra = static_cast<int>(C % T);

    for (int attempt = 0; attempt < 100; ++attempt) {
        // Select workers uniformly, ignoring classes.
        std::vector<int> worker_ids(static_cast<std::size_t>(W));
        for (int w = 0; w < W; ++w) worker_ids[static_cast<std::size_t>(w)] = w;
        for (int i = 0; i < n_sel; ++i) {
            const std::size_t j = i + rng.below(static_cast<std::size_t>(W - i));
            std::swap(worker_ids[static_cast<std::size_t>(i)], worker_ids[j]);
        }

        // Task stubs arranged in rounds, each an independent random
        // permutation of the tasks; the last (partial) round holds the
        // `extra` tasks that get one more assignment. A worker slice can then
        // only repeat a task where it straddles a round boundary, which the
        // retry loop absorbs; a fully shuffled stub list would almost always
        // collide at r = 20.
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(C));
        std::vector<int> round(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) round[static_cast<std::size_t>(t)] = t;
        for (long long i = 0; i < base; ++i) {
            rng.shuffle(round);
            stubs.insert(stubs.end(), round.begin(), round.end());
        }
        if (extra > 0) {
            rng.shuffle(round);
            stubs.insert(stubs.end(), round.begin(), round.begin() + extra);
        }

        Allocation alloc(T, W);
        bool ok = true;
        std::size_t pos = 0;
        for (int i = 0; i < n_sel && ok; ++i) {
            const int w = worker_ids[static_cast<std::size_t>(i)];
            const long long take = std::min<long long>(r, C - static_cast<long long>(pos));
            for (long long j = 0; j < take; ++j) {
                if (!alloc.add(stubs[pos++], w)) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) return alloc;
    }
    throw std::runtime_error("uniform_allocate: no duplicate-free matching in 100 attempts");
}

std::string to_edge_list(const Allocation& alloc) {
    std::ostringstream out;
    for (const auto& [t, w] : alloc.pairs()) out << t << ' ' << w << '\n';
    return out.str();
}

std::string to_weight_csv(const IntMatrix& weights) {
    std::ostringstream out;
    for (std::size_t t = 0; t < weights.rows(); ++t) {
        for (std::size_t k = 0; k < weights.cols(); ++k) {
            if (k) out << ',';
            out << weights(t, k);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace crowdrep
