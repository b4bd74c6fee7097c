#pragma once

#include "scs/model.hpp"
#include "scs/rng.hpp"
#include "scs/state.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace scs {

struct StepConfig {
    double dt = 1e-3;
    double t_final = 2.0;
    std::size_t record_every = 10;
    std::uint64_t seed = 42;
    // scheme: Euler-Maruyama (the only one implemented)
};

void validate(const StepConfig& cfg);

std::size_t step_count(const StepConfig& cfg);  // ceil(t_final / dt)

struct SimulationFault : std::runtime_error {
    SimulationFault(std::size_t step, double time);
    std::size_t step_index;
    double time;
};

// simulation halts cleanly when any velocity component exceeds this
inline constexpr double kVelocityOverflowGuard = 1e12;

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<ParticleState> states;
    std::uint64_t noise_seed = 0;
    ModelParams params;
    bool centered = false;
    bool overflow_halted = false;
    std::size_t halt_step = 0;
    // largest pairwise distance seen in pairwise drift evaluations
    double max_pair_distance = 0.0;
    // true when the kernel carries a finite certified radius that was exceeded
    bool kernel_domain_exceeded = false;
};

// One Euler-Maruyama step. dW is a single N(0, dt) draw shared by all
// particles and components. With `centered` set, the noise reference is zero
// (fluctuation system); otherwise it is the instantaneous ensemble mean
// velocity of the input state. Centered N=1 runs use the mean-field
// single-copy drift -kappa psi(0) v - x. Throws SimulationFault (step 0) on
// non-finite output.
ParticleState em_step(const ParticleState& state, const ModelParams& params,
                      double dt, double dW, bool centered);

TrajectoryRecord simulate(const ParticleState& initial, const ModelParams& params,
                          const StepConfig& cfg, bool centered);

// i.i.d. uniform positions and velocities in [-b, b]^dim; with project_means,
// ensemble means are subtracted (n=1 lands exactly at the origin).
ParticleState init_uniform(std::size_t n, std::size_t dim, double box_half_width,
                           std::uint64_t seed, bool project_means);

// Realization k runs with seed derive_seed(cfg.seed, k).
std::vector<TrajectoryRecord> fan_out(const ParticleState& initial, const ModelParams& params,
                                      const StepConfig& cfg, bool centered, std::size_t m);

namespace detail {
// Allocation-free EM step for the coupled-system loops; `next` must have the
// same shape as `state`. Tracks the largest pairwise distance when the
// pairwise drift path runs and max_pair_dist is non-null.
void em_step_into(const ParticleState& state, const ModelParams& params, double dt, double dW,
                  bool centered, ParticleState& next, std::vector<double>& scratch,
                  double* max_pair_dist);
}  // namespace detail

}  // namespace scs
