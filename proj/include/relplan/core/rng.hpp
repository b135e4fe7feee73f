#pragma once

#include <cstdint>

namespace relplan {

/// Deterministic 64-bit generator (splitmix64 core).
///
/// The same seed yields the same sequence on every platform, unlike the
/// standard <random> distributions. Independent streams are derived with
/// fork(), so parallel and serial runs can consume identical randomness.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Unbiased via rejection; n must be > 0.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform_below(n));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Derive an independent stream from this generator's seed (not its
    /// current state), so fork(tag) is reproducible no matter how much the
    /// parent has been consumed. Use distinct tags per unit of work.
    Rng fork(std::uint64_t tag) const {
        return Rng(mix(seed_, tag));
    }

    Rng fork(std::uint64_t tag_a, std::uint64_t tag_b) const {
        return Rng(mix(mix(seed_, tag_a), tag_b));
    }

    std::uint64_t seed() const { return seed_; }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace relplan
