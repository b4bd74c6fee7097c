#include "scs/state.hpp"

#include <cmath>
#include <stdexcept>

namespace scs {

ParticleState make_state(std::size_t n, std::size_t dim) {
    if (n == 0 || dim == 0) {
        throw std::invalid_argument("state requires n >= 1 and dim >= 1");
    }
    ParticleState state;
    state.n = n;
    state.dim = dim;
    state.pos.assign(n * dim, 0.0);
    state.vel.assign(n * dim, 0.0);
    return state;
}

void check_shape(const ParticleState& state) {
    if (state.n == 0 || state.dim == 0 || state.pos.size() != state.n * state.dim ||
        state.vel.size() != state.n * state.dim) {
        throw std::invalid_argument("state shape mismatch: pos/vel must both be n x dim");
    }
}

bool all_finite(const ParticleState& state) {
    for (double x : state.pos) {
        if (!std::isfinite(x)) return false;
    }
    for (double v : state.vel) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double max_column_sum(const ParticleState& state) {
    double worst = 0.0;
    for (std::size_t k = 0; k < state.dim; ++k) {
        double sx = 0.0, sv = 0.0;
        for (std::size_t i = 0; i < state.n; ++i) {
            sx += state.x(i, k);
            sv += state.v(i, k);
        }
        worst = std::max(worst, std::max(std::abs(sx), std::abs(sv)));
    }
    return worst;
}

bool is_centered(const ParticleState& state) {
    double scale = 1.0;
    for (double x : state.pos) scale = std::max(scale, std::abs(x));
    for (double v : state.vel) scale = std::max(scale, std::abs(v));
    return max_column_sum(state) <= 1e-10 * scale;
}

std::pair<MacroState, CenteredState> macro_decompose(const ParticleState& state) {
    check_shape(state);
    MacroState macro;
    macro.time = state.time;
    macro.x_c.assign(state.dim, 0.0);
    macro.v_c.assign(state.dim, 0.0);
    for (std::size_t i = 0; i < state.n; ++i) {
        for (std::size_t k = 0; k < state.dim; ++k) {
            macro.x_c[k] += state.x(i, k);
            macro.v_c[k] += state.v(i, k);
        }
    }
    const double inv = 1.0 / static_cast<double>(state.n);
    for (std::size_t k = 0; k < state.dim; ++k) {
        macro.x_c[k] *= inv;
        macro.v_c[k] *= inv;
    }
    CenteredState centered{state};
    for (std::size_t i = 0; i < state.n; ++i) {
        for (std::size_t k = 0; k < state.dim; ++k) {
            centered.state.x(i, k) -= macro.x_c[k];
            centered.state.v(i, k) -= macro.v_c[k];
        }
    }
    return {macro, centered};
}

ParticleState recompose(const MacroState& macro, const CenteredState& centered) {
    check_shape(centered.state);
    if (macro.x_c.size() != centered.state.dim || macro.v_c.size() != centered.state.dim) {
        throw std::invalid_argument("macro/centered dimension mismatch");
    }
    ParticleState state = centered.state;
    for (std::size_t i = 0; i < state.n; ++i) {
        for (std::size_t k = 0; k < state.dim; ++k) {
            state.x(i, k) += macro.x_c[k];
            state.v(i, k) += macro.v_c[k];
        }
    }
    return state;
}

MacroState macro_closed_form(const std::vector<double>& x0, const std::vector<double>& v0, double t) {
    if (x0.size() != v0.size() || x0.empty()) {
        throw std::invalid_argument("macro closed form needs matching nonempty x0, v0");
    }
    MacroState macro;
    macro.time = t;
    const double c = std::cos(t);
    const double s = std::sin(t);
    macro.x_c.resize(x0.size());
    macro.v_c.resize(x0.size());
    for (std::size_t k = 0; k < x0.size(); ++k) {
        macro.x_c[k] = x0[k] * c + v0[k] * s;
        macro.v_c[k] = v0[k] * c - x0[k] * s;
    }
    return macro;
}

}  // namespace scs
