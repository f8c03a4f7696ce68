#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>

namespace clt {

// Counter-based stream generator. A stream is keyed by (seed, id...) hashed
// through splitmix64; output i is mix(key + i * gamma), so draws depend only
// on the key and the counter, never on which thread owns the stream. Ensemble
// code derives one stream per (seed, experiment, replicate, role) and results
// are identical at any thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed + kGamma)) {}

    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) : Rng(seed) {
        for (std::uint64_t id : ids) {
            state_ = mix(state_ ^ mix(id + kGamma));
        }
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform on (0, 1): 53 random bits, offset so 0 is never returned.
    double next_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on (-1, 1).
    double next_symmetric() { return 2.0 * next_double() - 1.0; }

    /// Standard normal via the polar (Marsaglia) method; no trig calls.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = next_symmetric();
            v = next_symmetric();
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Index in [0, n) by 64-bit multiply-shift.
    std::uint64_t next_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace clt
