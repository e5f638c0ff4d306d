#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace polyforest {

// Counter-based splittable generator built on the SplitMix64 update.
// A stream is a pure function of its 64-bit seed, so derived streams for
// (seed, d, n, rep, ...) tuples are reproducible regardless of scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_int(std::uint64_t n) {
        // Multiply-shift; bias is negligible for the n used here (n << 2^64).
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Marsaglia polar method; draws are consumed in pairs but no state is
    // cached, so a stream's output depends only on call order.
    double normal() {
        for (;;) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    int rademacher() { return bernoulli(0.5) ? 1 : -1; }

    // Derive an independent child stream tagged by `tag`.
    Rng split(std::uint64_t tag) const {
        Rng h(state_ ^ 0x6a09e667f3bcc909ULL);
        h.next_u64();
        Rng child(h.state_ + 0x9e3779b97f4a7c15ULL * (tag + 1));
        child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
};

// Hash a tuple of values into one 64-bit seed (order-sensitive).
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (std::uint64_t p : parts) {
        h ^= p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        Rng r(h);
        h = r.next_u64();
    }
    return h;
}

}  // namespace polyforest
