#pragma once

#include <cstdint>

namespace msopt {

// SplitMix64 (Steele, Lea, Flood 2014). All derived distributions are
// implemented here rather than taken from <random> so that streams are
// identical across standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next();
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Standard normal, Marsaglia polar method.
    double normal();
    // Gamma(shape, 1), Marsaglia-Tsang.
    double gamma(double shape);
    // Chi-squared with k degrees of freedom.
    double chi_squared(double k) { return 2.0 * gamma(0.5 * k); }
    // Independent child stream.
    SplitMix64 split() { return SplitMix64(next() ^ 0x6a09e667f3bcc909ULL); }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Seed for trial `index` derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace msopt
