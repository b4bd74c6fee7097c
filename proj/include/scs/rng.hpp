#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace scs {

// splitmix64 finalizer. Bijective on uint64, maps 0 to 0, so
// derive_seed(seed, 0) == seed and realization 0 of a fan-out replays the
// base run bit for bit.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return seed ^ mix64(stream);
}

// Per-realization stream tags, nested as derive_seed(derive_seed(seed, k), TAG).
inline constexpr std::uint64_t kStreamInit = 0x01;
inline constexpr std::uint64_t kStreamPath = 0x02;
inline constexpr std::uint64_t kStreamLaw = 0x03;

// mt19937_64 with explicit uniform/normal conversions. Box-Muller is used
// instead of std::normal_distribution so that draws are identical across
// standard library implementations; each normal consumes exactly two
// 64-bit words.
class Prng {
  public:
    explicit Prng(std::uint64_t seed) : gen_(seed) {}

    // uniform on [0, 1)
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;          // [0, 1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    std::mt19937_64 gen_;
};

// Brownian increments, one scalar per step, N(0, dt). Regenerating with the
// same (seed, dt, n) is bit-identical.
struct NoisePath {
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> increments;

    static NoisePath generate(std::uint64_t seed, double dt, std::size_t n_steps);
};

}  // namespace scs
