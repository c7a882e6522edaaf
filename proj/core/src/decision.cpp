#include "crowdrep/decision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "crowdrep/quadrature.hpp"

namespace crowdrep {

namespace {

constexpr double kMinProb = 1e-9;

DecisionResult finalize(std::vector<double> scores, Rng& rng) {
    DecisionResult result;
    result.scores = std::move(scores);
    const std::size_t T = result.scores.size();
    result.estimates.resize(T);
    result.tie_broken.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        const double s = result.scores[t];
        if (s == 0.0) {
            result.estimates[t] = rng.sign();
            result.tie_broken[t] = true;
        } else {
            result.estimates[t] = s > 0.0 ? 1 : -1;
            result.tie_broken[t] = false;
        }
    }
    return result;
}

double llr_weight(double p) {
    return std::log((1.0 - p) / p);
}

}  // namespace

std::string DecisionResult::to_csv() const {
    std::ostringstream out;
    out << "task, estimate, score, tie_broken\n";
    for (std::size_t t = 0; t < estimates.size(); ++t)
        out << t << ", " << estimates[t] << ", " << scores[t] << ", "
            << (tie_broken[t] ? 1 : 0) << '\n';
    return out.str();
}

DecisionResult decide_majority(const AnswerMatrix& answers, Rng& rng) {
    std::vector<double> scores(static_cast<std::size_t>(answers.num_tasks()), 0.0);
    for (int t = 0; t < answers.num_tasks(); ++t) {
        double sum = 0.0;
        for (const auto& [w, a] : answers.row(t)) sum += a;
        scores[static_cast<std::size_t>(t)] = sum;
    }
    return finalize(std::move(scores), rng);
}

DecisionResult decide_map(const AnswerMatrix& answers, const std::vector<int>& class_of,
                          const Matrix& pi, Rng& rng) {
    std::vector<double> scores(static_cast<std::size_t>(answers.num_tasks()), 0.0);
    for (int t = 0; t < answers.num_tasks(); ++t) {
        double llr = 0.0;
        for (const auto& [w, a] : answers.row(t)) {
            const double p = pi(static_cast<std::size_t>(t),
                                static_cast<std::size_t>(class_of[static_cast<std::size_t>(w)]));
            if (!(p >= kMinProb && p <= 0.5))
                throw std::invalid_argument("decide_map: pi must lie in [1e-9, 1/2]");
            llr += a * llr_weight(p);
        }
        scores[static_cast<std::size_t>(t)] = llr;
    }
    return finalize(std::move(scores), rng);
}

DecisionResult decide_oracle_map(const AnswerMatrix& answers, const Population& pop,
                                 Rng& rng) {
    std::vector<double> scores(static_cast<std::size_t>(answers.num_tasks()), 0.0);
    for (int t = 0; t < answers.num_tasks(); ++t) {
        double llr = 0.0;
        for (const auto& [w, a] : answers.row(t)) {
            const double p = std::max(pop.p(static_cast<std::size_t>(t),
                                            static_cast<std::size_t>(w)),
                                      kMinProb);
            llr += a * llr_weight(p);
        }
        scores[static_cast<std::size_t>(t)] = llr;
    }
    return finalize(std::move(scores), rng);
}

namespace {

// Leading right singular vector of the sparse +-1/0 answer matrix restricted
// to the given rows, over the active columns. Returns a dense length-W vector
// (zero on inactive columns), sign-fixed so that its sum is >= 0.
//
// Computed by two-vector simultaneous iteration on A^T A with a final 2x2
// Rayleigh-Ritz rotation, deterministic start (all-ones plus an alternating
// +-1 pattern). Plain single-vector power iteration is not enough here: when
// the spectrum is nearly degenerate (e.g. a block-diagonal matrix with two
// statistically identical blocks) its early stop leaves a systematic, sign-
// correct residual of the runner-up eigenvector, while the true leading
// vector is supported on one block only. The Ritz step resolves the top-two
// subspace exactly, matching a full SVD.
std::vector<double> leading_right_singular_vector(const AnswerMatrix& answers,
                                                  int row_begin, int row_end) {
    const int W = answers.num_workers();
    std::vector<int> col_index(static_cast<std::size_t>(W), -1);
    std::vector<int> active;
    for (int t = row_begin; t < row_end; ++t)
        for (const auto& [w, a] : answers.row(t))
            if (col_index[static_cast<std::size_t>(w)] < 0) {
                col_index[static_cast<std::size_t>(w)] = static_cast<int>(active.size());
                active.push_back(w);
            }
    std::vector<double> v_full(static_cast<std::size_t>(W), 0.0);
    const std::size_t n = active.size();
    if (n == 0) return v_full;

    std::vector<double> u(static_cast<std::size_t>(row_end - row_begin));
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        // y = A^T (A x) over the active columns.
        for (int t = row_begin; t < row_end; ++t) {
            double s = 0.0;
            for (const auto& [w, a] : answers.row(t))
                s += a * x[static_cast<std::size_t>(col_index[static_cast<std::size_t>(w)])];
            u[static_cast<std::size_t>(t - row_begin)] = s;
        }
        std::fill(y.begin(), y.end(), 0.0);
        for (int t = row_begin; t < row_end; ++t) {
            const double s = u[static_cast<std::size_t>(t - row_begin)];
            for (const auto& [w, a] : answers.row(t))
                y[static_cast<std::size_t>(col_index[static_cast<std::size_t>(w)])] += a * s;
        }
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    auto normalize = [&](std::vector<double>& x) {
        const double norm = std::sqrt(dot(x, x));
        if (norm > 0.0)
            for (double& xi : x) xi /= norm;
        return norm;
    };

    std::vector<double> v0(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> v1(n);
    for (std::size_t i = 0; i < n; ++i) v1[i] = (i % 2 == 0) ? 1.0 : -1.0;
    {
        const double c = dot(v1, v0);
        for (std::size_t i = 0; i < n; ++i) v1[i] -= c * v0[i];
    }
    bool two = normalize(v1) > 1e-12 && n > 1;

    std::vector<double> w0(n), w1(n), ritz(n), prev(n, 0.0);
    for (int iter = 0; iter < 1000; ++iter) {
        apply(v0, w0);
        if (two) apply(v1, w1);

        // Rayleigh-Ritz on the current orthonormal basis (v0, v1).
        const double b00 = dot(v0, w0);
        double r0 = 1.0, r1 = 0.0;
        if (two) {
            const double b01 = dot(v0, w1);
            const double b11 = dot(v1, w1);
            const double half = 0.5 * (b00 - b11);
            const double disc = std::sqrt(half * half + b01 * b01);
            const double lead = 0.5 * (b00 + b11) + disc;
            // Eigenvector of [[b00,b01],[b01,b11]] for the larger eigenvalue.
            if (std::abs(b01) > 0.0) {
                r0 = b01;
                r1 = lead - b00;
                const double norm = std::sqrt(r0 * r0 + r1 * r1);
                r0 /= norm;
                r1 /= norm;
            } else if (b11 > b00) {
                r0 = 0.0;
                r1 = 1.0;
            }
        }
        for (std::size_t i = 0; i < n; ++i) ritz[i] = r0 * v0[i] + r1 * v1[i];

        const double align = dot(ritz, prev) >= 0.0 ? 1.0 : -1.0;
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = ritz[i] - align * prev[i];
            change += diff * diff;
        }
        prev = ritz;

        // Next orthonormal basis from (w0, w1) by Gram-Schmidt.
        std::swap(v0, w0);
        if (normalize(v0) == 0.0) break;  // A^T A x vanished; keep the Ritz vector
        if (two) {
            const double c = dot(w1, v0);
            std::swap(v1, w1);
            for (std::size_t i = 0; i < n; ++i) v1[i] -= c * v0[i];
            if (normalize(v1) <= 1e-14) two = false;
        }
        if (iter >= 30 && std::sqrt(change) <= 1e-14) break;
    }
    double total = 0.0;
    for (double x : prev) total += x;
    const double sign = total >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i)
        v_full[static_cast<std::size_t>(active[i])] = sign * prev[i];
    return v_full;
}

}  // namespace

DecisionResult decide_lra(const AnswerMatrix& answers, Rng& rng) {
    const std::vector<double> v =
        leading_right_singular_vector(answers, 0, answers.num_tasks());
    std::vector<double> scores(static_cast<std::size_t>(answers.num_tasks()), 0.0);
    for (int t = 0; t < answers.num_tasks(); ++t) {
        double s = 0.0;
        for (const auto& [w, a] : answers.row(t)) s += a * v[static_cast<std::size_t>(w)];
        scores[static_cast<std::size_t>(t)] = s;
    }
    return finalize(std::move(scores), rng);
}

DecisionResult decide_lra_blocks(const AnswerMatrix& answers,
                                 const std::vector<std::pair<int, int>>& task_groups,
                                 Rng& rng) {
    // Validate that the groups partition 0..T.
    int expected = 0;
    for (const auto& [begin, end] : task_groups) {
        if (begin != expected || end < begin)
            throw std::invalid_argument("decide_lra_blocks: groups must partition the tasks");
        expected = end;
    }
    if (expected != answers.num_tasks())
        throw std::invalid_argument("decide_lra_blocks: groups must partition the tasks");

    std::vector<double> scores(static_cast<std::size_t>(answers.num_tasks()), 0.0);
    for (const auto& [begin, end] : task_groups) {
        const std::vector<double> v = leading_right_singular_vector(answers, begin, end);
        for (int t = begin; t < end; ++t) {
            double s = 0.0;
            for (const auto& [w, a] : answers.row(t)) s += a * v[static_cast<std::size_t>(w)];
            scores[static_cast<std::size_t>(t)] = s;
        }
    }
    return finalize(std::move(scores), rng);
}

namespace {

// Mean of the density ~ exp(lambda * p) on [0, 1/2], evaluated in closed
// form with a series fallback around lambda = 0.
double exp_density_mean(double lambda) {
    const double b = 0.5;
    const double lb = lambda * b;
    if (std::abs(lb) < 1e-5) {
        // mean = b/2 + lambda b^2/12 - lambda^3 b^4/720 + ...
        return b / 2.0 + lb * b / 12.0 - lb * lb * lb * b / 720.0;
    }
    // mean = b/(1 - e^{-lambda b}) - 1/lambda
    return b / (1.0 - std::exp(-lb)) - 1.0 / lambda;
}

}  // namespace

double solve_lambda(double pi, double tolerance) {
    if (!(pi > 0.0 && pi < 0.5))
        throw std::invalid_argument("solve_lambda: pi must lie in (0, 1/2)");
    double lo = -1e4, hi = 1e4;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double mean = exp_density_mean(mid);
        if (std::abs(mean - pi) <= tolerance) return mid;
        if (mean < pi)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Shared message-passing loop. The worker-update callback receives, for one
// worker, the extrinsic quantities g_e = a_e * tanh(m_e / 2) for each of its
// edges and must fill the per-edge updated error estimates.
template <typename EdgeInit, typename WorkerUpdate>
DecisionResult run_mp(const AnswerMatrix& answers, int iterations, EdgeInit&& init,
                      WorkerUpdate&& update, Rng& rng, double p_min, double p_max) {
    const int T = answers.num_tasks();
    const int W = answers.num_workers();

    // Edge error-probability estimates indexed per worker, in column order.
    std::vector<std::vector<double>> p_est(static_cast<std::size_t>(W));
    std::vector<int> active;
    for (int w = 0; w < W; ++w) {
        if (answers.column(w).empty()) continue;
        active.push_back(w);
        auto& pe = p_est[static_cast<std::size_t>(w)];
        pe.resize(answers.column(w).size());
        for (double& p : pe) p = std::clamp(init(w), p_min, p_max);
    }
    std::vector<double> task_llr(static_cast<std::size_t>(T), 0.0);

    std::vector<double> g;      // a * tanh(m/2) per edge of the current worker
    std::vector<double> p_new;  // updated estimate per edge

    for (int iter = 1;; ++iter) {
        // Output LLRs from the current estimates.
        std::fill(task_llr.begin(), task_llr.end(), 0.0);
        for (int w : active) {
            const auto& col = answers.column(w);
            const auto& pe = p_est[static_cast<std::size_t>(w)];
            for (std::size_t e = 0; e < col.size(); ++e)
                task_llr[static_cast<std::size_t>(col[e].first)] +=
                    col[e].second * llr_weight(pe[e]);
        }
        if (iter >= iterations) break;

        // Worker-to-task updates from extrinsic task messages.
        for (int w : active) {
            const auto& col = answers.column(w);
            auto& pe = p_est[static_cast<std::size_t>(w)];
            g.resize(col.size());
            p_new.resize(col.size());
            for (std::size_t e = 0; e < col.size(); ++e) {
                const double extrinsic =
                    task_llr[static_cast<std::size_t>(col[e].first)] -
                    col[e].second * llr_weight(pe[e]);
                g[e] = col[e].second * std::tanh(0.5 * extrinsic);
            }
            update(w, g, p_new);
            for (std::size_t e = 0; e < col.size(); ++e)
                pe[e] = std::clamp(p_new[e], p_min, p_max);
        }
    }
    return finalize(std::move(task_llr), rng);
}

}  // namespace

DecisionResult decide_mp(const AnswerMatrix& answers, const std::vector<int>& class_of,
                         const std::vector<double>& pi, const MpConfig& cfg, Rng& rng) {
    if (cfg.iterations < 1) throw std::invalid_argument("decide_mp: iterations >= 1");
    if (cfg.quadrature_nodes < 8) throw std::invalid_argument("decide_mp: need >= 8 nodes");
    const int W = answers.num_workers();

    // Per-class max-entropy prior, evaluated at the quadrature nodes. pi is
    // clamped into the range reachable by the bisection bracket.
    const GaussLegendre rule(static_cast<std::size_t>(cfg.quadrature_nodes), 0.0, 0.5);
    const std::size_t n = rule.nodes.size();
    const std::size_t K = pi.size();
    std::vector<std::vector<double>> prior(K, std::vector<double>(n));
    std::vector<double> prior_mean(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double mean = std::clamp(pi[k], 1e-4, 0.4999);
        prior_mean[k] = mean;
        const double lambda = solve_lambda(mean, cfg.lambda_tolerance);
        const double shift = lambda > 0.0 ? 0.5 * lambda : 0.0;
        for (std::size_t i = 0; i < n; ++i)
            prior[k][i] = std::exp(lambda * rule.nodes[i] - shift);
    }

    for (int w = 0; w < W; ++w) {
        const int k = class_of[static_cast<std::size_t>(w)];
        if (k < 0 || static_cast<std::size_t>(k) >= K)
            throw std::invalid_argument("decide_mp: class index out of range");
    }
    auto init = [&](int w) { return pi[static_cast<std::size_t>(class_of[static_cast<std::size_t>(w)])]; };

    std::vector<double> node_product(n);
    auto update = [&](int w, const std::vector<double>& g, std::vector<double>& p_new) {
        const auto& fk = prior[static_cast<std::size_t>(class_of[static_cast<std::size_t>(w)])];
        // Full product of the edge factors at each node. Factors
        // 1 + (1-2p) g are strictly positive at interior nodes (|g| < 1 or
        // |1-2p| < 1), so the extrinsic product is the full product divided
        // by the edge's own factor.
        for (std::size_t i = 0; i < n; ++i) {
            double prod = fk[i];
            const double c = 1.0 - 2.0 * rule.nodes[i];
            for (double ge : g) prod *= std::max(1.0 + c * ge, 1e-300);
            node_product[i] = prod * rule.weights[i];
        }
        for (std::size_t e = 0; e < g.size(); ++e) {
            double numer = 0.0, denom = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double c = 1.0 - 2.0 * rule.nodes[i];
                const double ext = node_product[i] / std::max(1.0 + c * g[e], 1e-300);
                numer += ext * rule.nodes[i];
                denom += ext;
            }
            p_new[e] = denom > 0.0
                           ? numer / denom
                           : prior_mean[static_cast<std::size_t>(
                                 class_of[static_cast<std::size_t>(w)])];
        }
    };
    return run_mp(answers, cfg.iterations, init, update, rng, kMinProb, 0.5 - kMinProb);
}

DecisionResult decide_mp_haldane(const AnswerMatrix& answers,
                                 const std::vector<int>& class_of, const MpConfig& cfg,
                                 Rng& rng) {
    (void)class_of;  // the two-point prior is class-independent
    if (cfg.iterations < 1) throw std::invalid_argument("decide_mp_haldane: iterations >= 1");
    const int T = answers.num_tasks();
    const int W = answers.num_workers();

    // Under the two-point prior the posterior mean keeps p = 1/(1 + e^z)
    // with log-odds z that are exactly linear in the extrinsic task LLRs:
    // ln(prod(1+g)/prod(1-g)) = sum 2 atanh(a tanh(m/2)) = sum a*m. The
    // whole iteration therefore reduces to the linear update of the
    // simplified reference algorithm,
    //   m_{t->w} = sum_{w'!=w} a_{tw'} z_{t<-w'},
    //   z_{t<-w} = sum_{t'!=t} a_{t'w} m_{t'->w},
    // whose decisions are invariant under a global rescaling of z. The z's
    // are renormalized each iteration instead of clamped (clamping would
    // saturate every weight to the same magnitude within a few iterations).
    //
    // Iteration 1 scores come from the prior mean p = 1/2 (all weights zero,
    // every task tied). The zero state is a fixed point, so the first update
    // draws the weights at random, z ~ N(1, 1), as the reference does.
    std::vector<std::vector<double>> z(static_cast<std::size_t>(W));
    std::vector<int> active;
    for (int w = 0; w < W; ++w)
        if (!answers.column(w).empty()) {
            active.push_back(w);
            z[static_cast<std::size_t>(w)].assign(answers.column(w).size(), 0.0);
        }

    std::vector<double> task_sum(static_cast<std::size_t>(T), 0.0);
    std::vector<double> m;
    for (int iter = 1; iter < cfg.iterations; ++iter) {
        if (iter == 1) {
            for (int w : active)
                for (double& v : z[static_cast<std::size_t>(w)]) {
                    const double u1 = 1.0 - rng.uniform();
                    const double u2 = rng.uniform();
                    v = 1.0 + std::sqrt(-2.0 * std::log(u1)) *
                                  std::cos(6.283185307179586 * u2);
                }
            continue;
        }
        std::fill(task_sum.begin(), task_sum.end(), 0.0);
        for (int w : active) {
            const auto& col = answers.column(w);
            const auto& zw = z[static_cast<std::size_t>(w)];
            for (std::size_t e = 0; e < col.size(); ++e)
                task_sum[static_cast<std::size_t>(col[e].first)] += col[e].second * zw[e];
        }
        double scale = 0.0;
        for (int w : active) {
            const auto& col = answers.column(w);
            auto& zw = z[static_cast<std::size_t>(w)];
            m.resize(col.size());
            double total = 0.0;
            for (std::size_t e = 0; e < col.size(); ++e) {
                m[e] = task_sum[static_cast<std::size_t>(col[e].first)] -
                       col[e].second * zw[e];
                total += col[e].second * m[e];
            }
            for (std::size_t e = 0; e < col.size(); ++e) {
                zw[e] = total - col[e].second * m[e];
                scale = std::max(scale, std::abs(zw[e]));
            }
        }
        if (scale > 0.0)
            for (int w : active)
                for (double& v : z[static_cast<std::size_t>(w)]) v /= scale;
    }

    std::vector<double> scores(static_cast<std::size_t>(T), 0.0);
    if (cfg.iterations > 1)
        for (int w : active) {
            const auto& col = answers.column(w);
            const auto& zw = z[static_cast<std::size_t>(w)];
            for (std::size_t e = 0; e < col.size(); ++e)
                scores[static_cast<std::size_t>(col[e].first)] += col[e].second * zw[e];
        }
    return finalize(std::move(scores), rng);
}

}  // namespace crowdrep
