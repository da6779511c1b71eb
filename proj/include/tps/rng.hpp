#pragma once

#include <cstdint>

namespace tps {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen as the project-wide generator
// because its output sequence is fully specified by the reference constants
// below, so runs agree bit-for-bit across platforms and implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) using the top 53 bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), n >= 1. Rejection-free modulo is fine here:
    // n is always tiny relative to 2^64 so the bias is far below any
    // tolerance used in this project.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    bool next_bernoulli(double p) { return next_double() < p; }

private:
    std::uint64_t state_;
};

// Derives an independent stream from (seed, index), e.g. one per bootstrap
// replicate or per generated trajectory, so parallel order never matters.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0xA0761D6478BD642Full + index * 0xE7037ED1A0B428DBull));
    return SplitMix64(mixer.next_u64());
}

}  // namespace tps
