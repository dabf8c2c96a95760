#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace gsdmm {

// Independent, reproducible random streams derived from one user seed.
// Each consumer draws from its own stream id so that adding draws in one
// place never shifts the sequence seen by another.
enum class Stream : std::uint64_t {
    Init = 0,
    Sweep = 1,
    Generator = 2,
};

class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    RandomStream(std::uint64_t seed, Stream stream)
        : RandomStream(seed, static_cast<std::uint64_t>(stream)) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }

    result_type operator()() { return engine_(); }

    // Uniform on [0, 1) with 53 bits of resolution. Bit-exact across platforms,
    // unlike std::uniform_real_distribution whose algorithm is unspecified.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = max() - (max() % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gsdmm
