#pragma once

#include "scs/state.hpp"

#include <cstddef>
#include <vector>

namespace scs {

// Weighted point set over phase space (x, v); the finite proxy for a kinetic
// density. Weights sum to the represented mass.
struct WeightedPhaseSample {
    std::size_t dim = 0;
    std::vector<double> pos;      // k * dim
    std::vector<double> vel;      // k * dim
    std::vector<double> weights;  // k

    std::size_t size() const { return weights.size(); }
};

// Equal-weight empirical measure of a particle state, total mass `mass`.
WeightedPhaseSample sample_from_state(const ParticleState& state, double mass);

double total_mass(const WeightedPhaseSample& sample);

}  // namespace scs
