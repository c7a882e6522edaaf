#ifndef TESTS_ORACLES_HPP
#define TESTS_ORACLES_HPP

// Independent reference implementations used to cross-check the library.
// These deliberately use different algorithms from the code under test
// (raw exponential enumeration, dense Jacobi eigensolver, composite Simpson
// integration) so that agreement is meaningful.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracles {

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Expand per-class counts into one error probability per assigned answer.
inline std::vector<double> expand(const std::vector<int>& d, const std::vector<double>& pi) {
    std::vector<double> p;
    for (std::size_t k = 0; k < d.size(); ++k)
        for (int i = 0; i < d[k]; ++i) p.push_back(pi[k]);
    return p;
}

// Mutual information I(a; tau) in bits by enumerating all 2^n answer vectors.
inline double brute_mutual_information(const std::vector<int>& d,
                                       const std::vector<double>& pi) {
    const std::vector<double> p = expand(d, pi);
    const std::size_t n = p.size();
    if (n > 25) throw std::invalid_argument("too many answers for brute force");
    double h_a = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        // P(a | tau=+1): bit set = answer -1 (wrong); P(a | tau=-1) mirrors.
        double plus = 1.0, minus = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool wrong = (mask >> i) & 1u;
            plus *= wrong ? p[i] : 1.0 - p[i];
            minus *= wrong ? 1.0 - p[i] : p[i];
        }
        const double pa = 0.5 * (plus + minus);
        if (pa > 0.0) h_a -= pa * std::log2(pa);
    }
    double cond = 0.0;
    for (double pe : p) cond += binary_entropy(pe);
    return h_a - cond;
}

// Exact MAP error probability by enumerating all 2^n answer vectors given
// tau = +1; LLR ties count 1/2.
inline double brute_error_probability(const std::vector<int>& d,
                                      const std::vector<double>& pi,
                                      double tie_tol = 1e-9) {
    const std::vector<double> p = expand(d, pi);
    const std::size_t n = p.size();
    if (n > 25) throw std::invalid_argument("too many answers for brute force");
    double pe = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        double prob = 1.0, llr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool wrong = (mask >> i) & 1u;
            prob *= wrong ? p[i] : 1.0 - p[i];
            const double pc = std::max(p[i], 1e-12);
            const double z = std::log((1.0 - pc) / pc);
            llr += (wrong ? -1.0 : 1.0) * z;
        }
        if (llr < -tie_tol)
            pe += prob;
        else if (llr <= tie_tol)
            pe += 0.5 * prob;
    }
    return pe;
}

// Leading eigenvector of a dense symmetric matrix by cyclic Jacobi sweeps.
// Returns the eigenvector of the largest eigenvalue, sign-fixed so that its
// component sum is >= 0.
inline std::vector<double> jacobi_leading_eigenvector(std::vector<std::vector<double>> m) {
    const std::size_t n = m.size();
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m[p][q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = m[p][p], aqq = m[q][q];
                const double phi = 0.5 * std::atan2(2.0 * apq, aqq - app);
                const double c = std::cos(phi), s = std::sin(phi);
                for (std::size_t i = 0; i < n; ++i) {
                    const double mip = m[i][p], miq = m[i][q];
                    m[i][p] = c * mip - s * miq;
                    m[i][q] = s * mip + c * miq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double mpi = m[p][i], mqi = m[q][i];
                    m[p][i] = c * mpi - s * mqi;
                    m[q][i] = s * mpi + c * mqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v[i][p], viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (m[i][i] > m[best][best]) best = i;
    std::vector<double> out(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = v[i][best];
        sum += out[i];
    }
    if (sum < 0.0)
        for (double& x : out) x = -x;
    return out;
}

// Mean of the density ~ exp(lambda * p) on [0, 1/2] by composite Simpson.
inline double simpson_exp_density_mean(double lambda, int intervals = 4096) {
    const double a = 0.0, b = 0.5;
    const double h = (b - a) / intervals;
    const double shift = lambda > 0.0 ? lambda * b : 0.0;  // overflow guard
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= intervals; ++i) {
        const double x = a + i * h;
        const double f = std::exp(lambda * x - shift);
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        num += w * f * x;
        den += w * f;
    }
    return num / den;
}

}  // namespace oracles

#endif  // TESTS_ORACLES_HPP
