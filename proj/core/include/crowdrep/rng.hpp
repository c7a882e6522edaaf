#ifndef CROWDREP_RNG_HPP
#define CROWDREP_RNG_HPP

#include <cstdint>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace crowdrep {

// splitmix64 step; also used to mix seed components into stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash a master seed together with stream indices (sweep point, strategy,
// trial, ...) into an independent stream seed.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = master;
    (void)splitmix64(h);
    for (std::uint64_t p : parts) {
        h ^= p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        (void)splitmix64(h);
    }
    std::uint64_t s = h;
    return splitmix64(s);
}

// xoshiro256** with splitmix64 seeding. Self-contained so that identical
// seeds reproduce identical draws on any platform / standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        // rejection-free modulo bias is negligible for our n << 2^64,
        // but use Lemire-style multiply-shift anyway.
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<std::size_t>(m >> 64);
    }

    // Fair coin in {-1, +1}.
    int sign() { return (next_u64() & 1u) ? 1 : -1; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derive an independent child stream.
    Rng child(std::uint64_t index) {
        std::uint64_t s = next_u64();
        return Rng(derive_seed(s, {index}));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

}  // namespace crowdrep

#endif  // CROWDREP_RNG_HPP
