#pragma once

#include "scs/kernel.hpp"
#include "scs/state.hpp"

#include <cstddef>
#include <vector>

namespace scs {

struct ModelParams {
    double kappa = 1.0;   // coupling strength, > 0
    double sigma = 0.1;   // noise intensity under sqrt(2 sigma), > 0
    KernelSpec kernel;
    std::size_t n = 16;
    std::size_t dim = 2;
    bool compensated_sum = false;  // Kahan accumulation in the pairwise loop
};

// throws std::invalid_argument naming the offending field
void validate(const ModelParams& params);

struct Drift {
    std::vector<double> dx;  // = velocities
    std::vector<double> dv;  // alignment - position
};

// Generic O(N^2) pairwise drift of the interacting system:
//   dx_i = v_i,  dv_i = (kappa/N) sum_j psi(|x_j - x_i|)(v_j - v_i) - x_i.
// Accumulates in index order; optionally compensated.
Drift drift(const ParticleState& state, const ModelParams& params);

// Same, writing into caller buffers; returns the largest pairwise distance
// evaluated (for kernel-domain certification checks).
double drift_into(const ParticleState& state, const ModelParams& params,
                  std::vector<double>& dv);

// Noise coefficient rows sqrt(2 sigma) (v_i - v_ref); one scalar Brownian
// increment multiplies every row and component.
std::vector<double> diffusion(const ParticleState& state, double sigma,
                              const std::vector<double>& v_ref);

}  // namespace scs
