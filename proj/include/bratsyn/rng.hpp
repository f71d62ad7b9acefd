#ifndef BRATSYN_RNG_HPP
#define BRATSYN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace bratsyn {

// splitmix64, used for seeding and seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_str(std::uint64_t seed, std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t st = h;
    return splitmix64(st);
}

inline std::uint64_t hash_u64(std::uint64_t seed, std::uint64_t v) {
    std::uint64_t st = seed ^ (v * 0x9e3779b97f4a7c15ULL);
    return splitmix64(st);
}

// xoshiro256** with fixed cross-platform semantics; all sampling goes
// through this type so outputs are reproducible bit-for-bit given a seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t st = seed;
        for (auto& w : state_) w = splitmix64(st);
    }

    static Rng derive(std::uint64_t master, std::string_view label) {
        return Rng(hash_str(master, label));
    }
    static Rng derive(std::uint64_t master, std::uint64_t index) {
        return Rng(hash_u64(master, index));
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

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, bound); unbiased via rejection
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // uniform integer in [lo, hi] inclusive
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool bernoulli(double p) { return uniform() < p; }

    // standard normal, Box-Muller
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Number of successes in n independent Bernoulli(p) trials, sampled by
// skipping failure gaps geometrically so the cost is O(np + 1).
inline std::uint64_t binomial_count(std::uint64_t n, double p, Rng& rng) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    const double denom = std::log1p(-p);
    std::uint64_t count = 0;
    double pos = -1.0;
    for (;;) {
        double u = 0.0;
        while (u == 0.0) u = rng.uniform();
        pos += std::floor(std::log(u) / denom) + 1.0;
        if (pos >= static_cast<double>(n)) return count;
        ++count;
    }
}

} // namespace bratsyn

#endif
