#include "scs/model.hpp"

#include <cmath>
#include <stdexcept>

namespace scs {

void validate(const ModelParams& params) {
    if (!(params.kappa > 0.0) || !std::isfinite(params.kappa)) {
        throw std::invalid_argument("kappa must be positive and finite");
    }
    if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) {
        throw std::invalid_argument("sigma must be positive and finite");
    }
    if (params.n == 0) throw std::invalid_argument("n must be >= 1");
    if (params.dim == 0) throw std::invalid_argument("dim must be >= 1");
    validate(params.kernel);
}

namespace {

double pair_distance_sq(const ParticleState& state, std::size_t i, std::size_t j) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < state.dim; ++k) {
        const double d = state.x(j, k) - state.x(i, k);
        r2 += d * d;
    }
    return r2;
}

}  // namespace

double drift_into(const ParticleState& state, const ModelParams& params,
                  std::vector<double>& dv) {
    check_shape(state);
    if (state.n != params.n || state.dim != params.dim) {
        throw std::invalid_argument("state shape does not match model params");
    }
    const std::size_t n = state.n;
    const std::size_t d = state.dim;
    dv.assign(n * d, 0.0);
    const double scale = params.kappa / static_cast<double>(n);
    double max_r2 = 0.0;

    if (params.compensated_sum) {
        std::vector<double> comp(n * d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double r2 = pair_distance_sq(state, i, j);
                max_r2 = std::max(max_r2, r2);
                const double w = scale * kernel_eval_sq(params.kernel, r2);
                for (std::size_t k = 0; k < d; ++k) {
                    const double term = w * (state.v(j, k) - state.v(i, k));
                    const double y = term - comp[i * d + k];
                    const double t = dv[i * d + k] + y;
                    comp[i * d + k] = (t - dv[i * d + k]) - y;
                    dv[i * d + k] = t;
                }
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double r2 = pair_distance_sq(state, i, j);
                max_r2 = std::max(max_r2, r2);
                const double w = scale * kernel_eval_sq(params.kernel, r2);
                for (std::size_t k = 0; k < d; ++k) {
                    dv[i * d + k] += w * (state.v(j, k) - state.v(i, k));
                }
            }
        }
    }

    for (std::size_t e = 0; e < n * d; ++e) {
        dv[e] -= state.pos[e];
    }
    return std::sqrt(max_r2);
}

Drift drift(const ParticleState& state, const ModelParams& params) {
    Drift out;
    out.dx = state.vel;
    drift_into(state, params, out.dv);
    return out;
}

std::vector<double> diffusion(const ParticleState& state, double sigma,
                              const std::vector<double>& v_ref) {
    check_shape(state);
    if (v_ref.size() != state.dim) {
        throw std::invalid_argument("diffusion reference velocity must have length dim");
    }
    const double amp = std::sqrt(2.0 * sigma);
    std::vector<double> rows(state.n * state.dim);
    for (std::size_t i = 0; i < state.n; ++i) {
        for (std::size_t k = 0; k < state.dim; ++k) {
            rows[i * state.dim + k] = amp * (state.v(i, k) - v_ref[k]);
        }
    }
    return rows;
}

}  // namespace scs
