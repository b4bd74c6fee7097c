#include "scs/sample.hpp"

#include <numeric>
#include <stdexcept>

namespace scs {

WeightedPhaseSample sample_from_state(const ParticleState& state, double mass) {
    check_shape(state);
    if (!(mass > 0.0)) throw std::invalid_argument("sample mass must be positive");
    WeightedPhaseSample sample;
    sample.dim = state.dim;
    sample.pos = state.pos;
    sample.vel = state.vel;
    sample.weights.assign(state.n, mass / static_cast<double>(state.n));
    return sample;
}

double total_mass(const WeightedPhaseSample& sample) {
    return std::accumulate(sample.weights.begin(), sample.weights.end(), 0.0);
}

}  // namespace scs
