// Deterministic random streams. Generators are seeded per entity via a hash of
// (seed, tag) so draws are independent of evaluation order; numbers do not
// depend on the standard library's distribution implementations.
#ifndef SOCAP_RNG_HPP
#define SOCAP_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace socap {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// xoshiro256++
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_double() < p; }

    // uniform in [0, bound), bound > 0
    std::uint64_t next_below(std::uint64_t bound) {
        // Lemire's multiply-shift with rejection
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t t = -bound % bound;
            while (lo < t) {
                x = next();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // uniform integer in [lo, hi] inclusive
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double(), u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // Number of failures before the next success in Bernoulli(p) trials;
    // used for geometric edge skipping in sparse graph generation.
    std::uint64_t next_geometric_skip(double p) {
        if (p >= 1.0) return 0;
        double u = next_double();
        while (u <= 0.0) u = next_double();
        return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p)));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Per-entity stream: identical regardless of the order entities are visited in.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t salt = 0) {
    std::uint64_t st = seed ^ (0x9E3779B97F4A7C15ULL + fnv1a(tag)) ^ (salt * 0xD1B54A32D192ED03ULL);
    return splitmix64(st);
}

inline Rng derive_rng(std::uint64_t seed, std::string_view tag, std::uint64_t salt = 0) {
    return Rng(derive_seed(seed, tag, salt));
}

}  // namespace socap

#endif
