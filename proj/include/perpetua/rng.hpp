#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace perpetua {

namespace detail {
/// splitmix64 scrambler; decorrelates nearby seed values before they reach the engine.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Deterministic generator wrapper. Samples are identical for a given seed on
/// every platform: uniforms are built from raw engine words, never from
/// std::uniform_real_distribution (whose output is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(detail::splitmix64(seed)) {}

    /// Stream-split rule: stream i of a root seed is seeded with
    /// root_seed XOR golden-ratio-multiplied (i+1), then scrambled.
    /// Distinct i give decorrelated streams; merging per-stream results in
    /// stream order is therefore reproducible and order-independent.
    static Rng stream(std::uint64_t root_seed, std::uint64_t index) {
        return Rng(root_seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1); never returns 0 or 1, so logs are safe.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard exponential via inverse transform.
    double exponential() { return -std::log(uniform()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace perpetua
