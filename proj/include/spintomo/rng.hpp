#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace spintomo::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** by Blackman & Vigna. Self-contained so sampled records are
// bit-identical across platforms and standard libraries.
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        for (auto& word : s_) word = splitmix64(seed);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform double in [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Counter-based stream derivation: the stream depends only on (seed, a, b),
// never on evaluation order or thread scheduling.
inline Xoshiro256ss stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t state = seed;
    std::uint64_t h = splitmix64(state);
    state ^= a * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    h ^= splitmix64(state);
    state ^= b * 0x9e3779b97f4a7c15ULL + 0x1c69b3f74ac4ae35ULL;
    h ^= splitmix64(state);
    return Xoshiro256ss(h);
}

// Multinomial draw by inverse-CDF walk. probs need not be normalized exactly;
// any residual mass above the cumulative tail lands in the last bucket.
inline std::vector<long long> multinomial(Xoshiro256ss& gen, long long shots,
                                          std::span<const double> probs) {
    const std::size_t k = probs.size();
    std::vector<double> cdf(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        acc += probs[i] > 0.0 ? probs[i] : 0.0;
        cdf[i] = acc;
    }
    std::vector<long long> counts(k, 0);
    if (k == 0) return counts;
    for (long long shot = 0; shot < shots; ++shot) {
        const double u = gen.uniform() * acc;
        std::size_t lo = 0, hi = k - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u < cdf[mid]) hi = mid; else lo = mid + 1;
        }
        ++counts[lo];
    }
    return counts;
}

inline long long binomial(Xoshiro256ss& gen, long long trials, double p) {
    long long successes = 0;
    for (long long t = 0; t < trials; ++t)
        if (gen.uniform() < p) ++successes;
    return successes;
}

} // namespace spintomo::rng
