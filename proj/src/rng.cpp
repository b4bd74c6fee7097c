#include "scs/rng.hpp"

#include <cmath>

namespace scs {

NoisePath NoisePath::generate(std::uint64_t seed, double dt, std::size_t n_steps) {
    NoisePath path;
    path.dt = dt;
    path.seed = seed;
    path.increments.resize(n_steps);
    Prng prng(seed);
    const double scale = std::sqrt(dt);
    for (std::size_t k = 0; k < n_steps; ++k) {
        path.increments[k] = scale * prng.normal();
    }
    return path;
}

}  // namespace scs
