#pragma once

#include <cstdint>
#include <random>

namespace gridsig {

/// Seeded 64-bit generator with a portable uniform mapping. std::uniform_*
/// distributions are implementation-defined, so doubles are built directly
/// from the top 53 bits of the Mersenne Twister output.
class Rng {
public:
    Rng() : engine_(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n));
    }

    bool operator==(const Rng&) const = default;

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to decorrelate derived seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stream numbering for a run: stream 0 drives vehicle insertion, stream
/// 1 + i drives exploration of agent i.
constexpr std::uint64_t kInsertionStream = 0;
constexpr std::uint64_t kAgentStreamBase = 1;
constexpr std::uint64_t kStreamsPerRun = 1024;

constexpr std::uint64_t stream_seed(std::uint64_t run_seed, std::uint64_t stream) {
    return mix_seed(run_seed * kStreamsPerRun + stream);
}

}  // namespace gridsig
