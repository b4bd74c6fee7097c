#include "scs/engine.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scs {

void validate(const StepConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
        throw std::invalid_argument("dt must be positive and finite");
    }
    if (!(cfg.t_final > 0.0) || !std::isfinite(cfg.t_final)) {
        throw std::invalid_argument("t_final must be positive and finite");
    }
    if (cfg.dt > cfg.t_final) {
        throw std::invalid_argument("dt must not exceed t_final");
    }
    if (cfg.record_every == 0) {
        throw std::invalid_argument("record_every must be >= 1");
    }
}

std::size_t step_count(const StepConfig& cfg) {
    return static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.dt - 1e-12));
}

SimulationFault::SimulationFault(std::size_t step, double t)
    : std::runtime_error([&] {
          std::ostringstream msg;
          msg << "non-finite state at step " << step << ", t = " << t;
          return msg.str();
      }()),
      step_index(step),
      time(t) {}

namespace {

double max_abs_velocity(const ParticleState& state) {
    double m = 0.0;
    for (double v : state.vel) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

namespace detail {

void em_step_into(const ParticleState& state, const ModelParams& params, double dt, double dW,
                  bool centered, ParticleState& next, std::vector<double>& dv_scratch,
                  double* max_pair_dist) {
    const std::size_t n = state.n;
    const std::size_t d = state.dim;

    next.pos = state.pos;
    next.vel = state.vel;
    next.n = n;
    next.dim = d;
    next.time = state.time + dt;

    // mean velocity of the input state
    std::vector<double> vbar(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) vbar[k] += state.v(i, k);
    }
    for (std::size_t k = 0; k < d; ++k) vbar[k] /= static_cast<double>(n);

    // velocity drift
    if (centered && n == 1) {
        // mean-field single copy: alignment coefficient kappa psi(0)
        const double kpsi = params.kappa * kernel_eval(params.kernel, 0.0);
        for (std::size_t k = 0; k < d; ++k) {
            next.v(0, k) += dt * (-kpsi * state.v(0, k) - state.x(0, k));
        }
    } else if (params.kernel.kind == KernelKind::Constant) {
        // exact O(N) form of the pairwise sum for constant weights
        const double kc = params.kappa * params.kernel.constant_value;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                next.v(i, k) += dt * (kc * (vbar[k] - state.v(i, k)) - state.x(i, k));
            }
        }
    } else {
        const double dist = drift_into(state, params, dv_scratch);
        if (max_pair_dist != nullptr) *max_pair_dist = std::max(*max_pair_dist, dist);
        for (std::size_t e = 0; e < n * d; ++e) {
            next.vel[e] += dt * dv_scratch[e];
        }
    }

    // positions and noise
    const double amp = std::sqrt(2.0 * params.sigma);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            next.x(i, k) += dt * state.v(i, k);
            const double ref = centered ? 0.0 : vbar[k];
            next.v(i, k) += dW * amp * (state.v(i, k) - ref);
        }
    }

    if (!all_finite(next)) {
        throw SimulationFault(0, next.time);
    }
}

}  // namespace detail

namespace {

ParticleState step_impl(const ParticleState& state, const ModelParams& params, double dt,
                        double dW, bool centered, double* max_pair_dist,
                        std::vector<double>& dv_scratch) {
    ParticleState next;
    detail::em_step_into(state, params, dt, dW, centered, next, dv_scratch, max_pair_dist);
    return next;
}

bool domain_exceeded(const KernelSpec& kernel, double max_dist) {
    if (kernel.kind == KernelKind::AlgebraicQuarter && std::isfinite(kernel.certified_radius)) {
        return max_dist > kernel.certified_radius;
    }
    if (kernel.kind == KernelKind::Custom && !kernel.table.empty()) {
        return max_dist > kernel.table.back().first;
    }
    return false;
}

}  // namespace

ParticleState em_step(const ParticleState& state, const ModelParams& params, double dt,
                      double dW, bool centered) {
    check_shape(state);
    if (state.n != params.n || state.dim != params.dim) {
        throw std::invalid_argument("state shape does not match model params");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    std::vector<double> scratch;
    return step_impl(state, params, dt, dW, centered, nullptr, scratch);
}

TrajectoryRecord simulate(const ParticleState& initial, const ModelParams& params,
                          const StepConfig& cfg, bool centered) {
    validate(params);
    validate(cfg);
    check_shape(initial);
    if (initial.n != params.n || initial.dim != params.dim) {
        throw std::invalid_argument("initial state shape does not match model params");
    }

    const std::size_t n_steps = step_count(cfg);
    const NoisePath path = NoisePath::generate(cfg.seed, cfg.dt, n_steps);

    TrajectoryRecord record;
    record.noise_seed = cfg.seed;
    record.params = params;
    record.centered = centered;

    ParticleState state = initial;
    auto record_state = [&record](const ParticleState& s) {
        record.times.push_back(s.time);
        record.states.push_back(s);
    };

    if (max_abs_velocity(state) > kVelocityOverflowGuard) {
        record.overflow_halted = true;
        record.halt_step = 0;
        record_state(state);
        return record;
    }
    record_state(state);

    std::vector<double> scratch;
    ParticleState next;
    for (std::size_t k = 0; k < n_steps; ++k) {
        try {
            detail::em_step_into(state, params, cfg.dt, path.increments[k], centered, next,
                                 scratch, &record.max_pair_distance);
        } catch (const SimulationFault& fault) {
            throw SimulationFault(k + 1, fault.time);
        }
        std::swap(state, next);
        if (max_abs_velocity(state) > kVelocityOverflowGuard) {
            record.overflow_halted = true;
            record.halt_step = k + 1;
            record_state(state);
            break;
        }
        if ((k + 1) % cfg.record_every == 0 || k + 1 == n_steps) {
            record_state(state);
        }
    }

    record.kernel_domain_exceeded = domain_exceeded(params.kernel, record.max_pair_distance);
    return record;
}

ParticleState init_uniform(std::size_t n, std::size_t dim, double box_half_width,
                           std::uint64_t seed, bool project_means) {
    if (!(box_half_width > 0.0)) {
        throw std::invalid_argument("box_half_width must be positive");
    }
    ParticleState state = make_state(n, dim);
    Prng prng(seed);
    for (double& x : state.pos) x = prng.uniform(-box_half_width, box_half_width);
    for (double& v : state.vel) v = prng.uniform(-box_half_width, box_half_width);
    if (project_means) {
        auto [macro, centered] = macro_decompose(state);
        state = centered.state;
    }
    return state;
}

std::vector<TrajectoryRecord> fan_out(const ParticleState& initial, const ModelParams& params,
                                      const StepConfig& cfg, bool centered, std::size_t m) {
    if (m == 0) throw std::invalid_argument("fan_out requires m >= 1");
    std::vector<TrajectoryRecord> records;
    records.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        StepConfig cfg_k = cfg;
        cfg_k.seed = derive_seed(cfg.seed, k);
        records.push_back(simulate(initial, params, cfg_k, centered));
    }
    return records;
}

}  // namespace scs
