#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace scs {

// Positions and velocities of n agents in `dim` dimensions, row-major n x dim.
struct ParticleState {
    double time = 0.0;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> pos;
    std::vector<double> vel;

    double& x(std::size_t i, std::size_t k) { return pos[i * dim + k]; }
    double x(std::size_t i, std::size_t k) const { return pos[i * dim + k]; }
    double& v(std::size_t i, std::size_t k) { return vel[i * dim + k]; }
    double v(std::size_t i, std::size_t k) const { return vel[i * dim + k]; }
};

ParticleState make_state(std::size_t n, std::size_t dim);

// throws std::invalid_argument on shape mismatch
void check_shape(const ParticleState& state);

bool all_finite(const ParticleState& state);

// Fluctuation state: column sums of pos and vel are (numerically) zero.
struct CenteredState {
    ParticleState state;
};

// Largest |column sum| over positions and velocities.
double max_column_sum(const ParticleState& state);

// Zero column sums within 1e-10 x max(1, largest column magnitude).
bool is_centered(const ParticleState& state);

struct MacroState {
    double time = 0.0;
    std::vector<double> x_c;
    std::vector<double> v_c;
};

std::pair<MacroState, CenteredState> macro_decompose(const ParticleState& state);
ParticleState recompose(const MacroState& macro, const CenteredState& centered);

// Exact solution of dx_c = v_c dt, dv_c = -x_c dt.
MacroState macro_closed_form(const std::vector<double>& x0, const std::vector<double>& v0, double t);

}  // namespace scs
