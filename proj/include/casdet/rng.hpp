#pragma once

#include <cmath>
#include <cstdint>

namespace casdet {

/// Counter-based splittable random stream: stream(master_seed, stream_id)
/// yields a sequence that depends only on the pair, never on how many other
/// streams exist or in what order they are consumed. Trials, chunks, and
/// scenes each get their own stream so parallel and serial execution tally
/// identically.
///
/// The generator is a splitmix64 walk; the starting state mixes both inputs
/// through the splitmix64 finalizer so distinct streams begin at
/// pseudo-random positions of the underlying sequence.
class rng_stream {
public:
    rng_stream(std::uint64_t master_seed, std::uint64_t stream_id)
        : state_(mix(master_seed + 0x9e3779b97f4a7c15ull) ^
                 mix(stream_id * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_unit() < p; }

    /// Box-Muller (cosine branch); consumes two uniforms per call.
    double next_normal(double mean, double stddev) {
        const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace casdet
