#include "scs/mckean.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace scs {

FieldEstimate empirical_fields(std::span<const double> x, const WeightedPhaseSample& law,
                               const KernelSpec& kernel) {
    if (law.size() == 0) throw std::invalid_argument("empirical fields need a nonempty sample");
    const std::size_t d = law.dim;
    if (x.size() != d) throw std::invalid_argument("query point dimension mismatch");

    FieldEstimate out;
    out.b.assign(d, 0.0);
    for (std::size_t j = 0; j < law.size(); ++j) {
        double r2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double dx = x[k] - law.pos[j * d + k];
            r2 += dx * dx;
        }
        const double w = law.weights[j] * kernel_eval_sq(kernel, r2);
        out.a += w;
        for (std::size_t k = 0; k < d; ++k) {
            out.b[k] += w * law.vel[j * d + k];
        }
    }
    return out;
}

PhasePoint mckean_step(const PhasePoint& copy, const FieldEstimate& fields,
                       const ModelParams& params, double dt, double dW) {
    const std::size_t d = copy.x.size();
    if (copy.v.size() != d || fields.b.size() != d) {
        throw std::invalid_argument("phase point / field dimension mismatch");
    }
    const double amp = std::sqrt(2.0 * params.sigma);
    PhasePoint next;
    next.x.resize(d);
    next.v.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        next.x[k] = copy.x[k] + copy.v[k] * dt;
        next.v[k] = copy.v[k] - params.kappa * (fields.a * copy.v[k] - fields.b[k]) * dt -
                    copy.x[k] * dt + amp * copy.v[k] * dW;
        if (!std::isfinite(next.x[k]) || !std::isfinite(next.v[k])) {
            throw SimulationFault(0, 0.0);
        }
    }
    return next;
}

namespace {

// Self-consistent ensemble of mean-field copies with cached per-copy fields.
// Fields come from the leave-one-out empirical law of the current ensemble.
struct LawEnsemble {
    ParticleState state;  // n = M copies
    double mass = 1.0;
    std::size_t field_stride = 1;
    bool pin_mean = true;

    std::vector<double> a;  // per copy
    std::vector<double> b;  // per copy, M x d

    void refresh_fields(const ModelParams& params) {
        const std::size_t m = state.n;
        const std::size_t d = state.dim;
        a.assign(m, 0.0);
        b.assign(m * d, 0.0);
        const double w = mass / static_cast<double>(m - 1);
        if (params.kernel.kind == KernelKind::Constant) {
            const double c = params.kernel.constant_value;
            std::vector<double> vsum(d, 0.0);
            for (std::size_t j = 0; j < m; ++j) {
                for (std::size_t k = 0; k < d; ++k) vsum[k] += state.v(j, k);
            }
            for (std::size_t i = 0; i < m; ++i) {
                a[i] = c * mass;
                for (std::size_t k = 0; k < d; ++k) {
                    b[i * d + k] = c * w * (vsum[k] - state.v(i, k));
                }
            }
            return;
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                double r2 = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    const double dx = state.x(j, k) - state.x(i, k);
                    r2 += dx * dx;
                }
                const double psi = w * kernel_eval_sq(params.kernel, r2);
                a[i] += psi;
                a[j] += psi;
                for (std::size_t k = 0; k < d; ++k) {
                    b[i * d + k] += psi * state.v(j, k);
                    b[j * d + k] += psi * state.v(i, k);
                }
            }
        }
    }

    // one EM step; dWs holds one increment per copy
    void step(const ModelParams& params, double dt, const std::vector<double>& dWs) {
        const std::size_t m = state.n;
        const std::size_t d = state.dim;
        const double amp = std::sqrt(2.0 * params.sigma);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                const double x = state.x(i, k);
                const double v = state.v(i, k);
                state.x(i, k) = x + v * dt;
                state.v(i, k) = v - params.kappa * (a[i] * v - b[i * d + k]) * dt - x * dt +
                                amp * v * dWs[i];
            }
        }
        state.time += dt;
        if (pin_mean) {
            std::vector<double> mx(d, 0.0), mv(d, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t k = 0; k < d; ++k) {
                    mx[k] += state.x(i, k);
                    mv[k] += state.v(i, k);
                }
            }
            for (std::size_t k = 0; k < d; ++k) {
                mx[k] /= static_cast<double>(m);
                mv[k] /= static_cast<double>(m);
            }
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t k = 0; k < d; ++k) {
                    state.x(i, k) -= mx[k];
                    state.v(i, k) -= mv[k];
                }
            }
        }
    }

    // field estimate at an external query point from the full ensemble
    void query(const ModelParams& params, const double* x, double& a_out, double* b_out) const {
        const std::size_t m = state.n;
        const std::size_t d = state.dim;
        const double w = mass / static_cast<double>(m);
        a_out = 0.0;
        for (std::size_t k = 0; k < d; ++k) b_out[k] = 0.0;
        if (params.kernel.kind == KernelKind::Constant) {
            const double c = params.kernel.constant_value;
            a_out = c * mass;
            for (std::size_t j = 0; j < m; ++j) {
                for (std::size_t k = 0; k < d; ++k) b_out[k] += c * w * state.v(j, k);
            }
            return;
        }
        for (std::size_t j = 0; j < m; ++j) {
            double r2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double dx = x[k] - state.x(j, k);
                r2 += dx * dx;
            }
            const double psi = w * kernel_eval_sq(params.kernel, r2);
            a_out += psi;
            for (std::size_t k = 0; k < d; ++k) b_out[k] += psi * state.v(j, k);
        }
    }
};

}  // namespace

McKeanTrajectory self_consistent_mckean(const McKeanEnsemble& initial, const ModelParams& params,
                                        const StepConfig& cfg, const McKeanRunConfig& run) {
    validate(params);
    validate(cfg);
    check_shape(initial.copies);
    if (initial.copies.n < 2) {
        throw std::invalid_argument("self-consistent run needs at least 2 copies");
    }
    if (run.field_stride == 0) throw std::invalid_argument("field_stride must be >= 1");

    LawEnsemble law{initial.copies, run.mass, run.field_stride, run.pin_mean, {}, {}};
    const std::size_t n_steps = step_count(cfg);
    const std::size_t m = initial.copies.n;

    McKeanTrajectory out;
    out.seed = cfg.seed;
    out.times.push_back(law.state.time);
    out.snapshots.push_back({law.state});

    Prng noise(cfg.seed);
    const double scale = std::sqrt(cfg.dt);
    std::vector<double> dWs(m);
    for (std::size_t k = 0; k < n_steps; ++k) {
        if (k % run.field_stride == 0) law.refresh_fields(params);
        for (std::size_t i = 0; i < m; ++i) dWs[i] = scale * noise.normal();
        law.step(params, cfg.dt, dWs);
        if (!all_finite(law.state)) throw SimulationFault(k + 1, law.state.time);
        if ((k + 1) % cfg.record_every == 0 || k + 1 == n_steps) {
            out.times.push_back(law.state.time);
            out.snapshots.push_back({law.state});
        }
    }
    return out;
}

McKeanConstants mckean_constants(const ModelParams& params, double mass,
                                 double f0_second_moment) {
    validate(params);
    if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
    if (!(f0_second_moment >= 0.0)) {
        throw std::invalid_argument("second moment must be nonnegative");
    }
    const double k = params.kappa;
    const double s = params.sigma;
    const double pm = params.kernel.psi_min;
    const double pM = params.kernel.psi_max;

    McKeanConstants c;
    c.hypotheses_hold = k * pm * mass > static_cast<double>(params.dim) * s;
    const double gap = k * pm * mass - s;
    c.delta = gap / k;
    const double hM = k * pM * mass;
    c.epsilon = std::min(0.5, 0.25 * gap / (hM * hM + 1.0));
    c.eta = std::min(0.5 * c.epsilon, 0.25 * gap);
    c.lambda = c.delta > 0.0
                   ? (2.0 / c.delta + 4.0 * c.epsilon * k) * k * pM * pM * mass * f0_second_moment
                   : std::numeric_limits<double>::infinity();
    if (c.hypotheses_hold) {
        const auto regime = kinetic_regime(params, mass, params.dim);
        c.c_star = std::min(regime.c_m.value(), c.eta);
    }
    return c;
}

void coupled_realization(const ParticleState& initial, const ModelParams& params,
                         const StepConfig& cfg, const CouplingConfig& coupling,
                         std::uint64_t path_seed, std::uint64_t law_seed,
                         std::vector<double>& times, std::vector<double>& err_x,
                         std::vector<double>& err_v) {
    check_shape(initial);
    const std::size_t n = initial.n;
    const std::size_t d = initial.dim;
    const std::size_t n_steps = step_count(cfg);
    if (coupling.field_stride == 0) throw std::invalid_argument("field_stride must be >= 1");
    if (coupling.field_mode == FieldMode::ExactConstant &&
        params.kernel.kind != KernelKind::Constant) {
        throw std::invalid_argument("exact fields require a constant kernel");
    }

    times.clear();
    err_x.clear();
    err_v.clear();

    // interacting fluctuation system and its mean-field copies share one path
    ParticleState sys = initial;
    ParticleState cop = initial;  // copy i pairs with particle i
    ParticleState sys_next, cop_next = cop;
    std::vector<double> scratch;

    // auxiliary law ensemble (Empirical mode only)
    LawEnsemble law;
    Prng law_noise(derive_seed(law_seed, 1));
    std::vector<double> law_dWs;
    const std::size_t m_law = coupling.law_sample_size;
    if (coupling.field_mode == FieldMode::Empirical) {
        if (m_law < 2) throw std::invalid_argument("law sample size must be >= 2");
        law.state = init_uniform(m_law, d, coupling.init_box, derive_seed(law_seed, 0),
                                 coupling.pin_law_mean);
        law.mass = coupling.mass;
        law.pin_mean = coupling.pin_law_mean;
        law_dWs.resize(m_law);
    }

    std::vector<double> cop_a(n, 0.0), cop_b(n * d, 0.0);
    const double exact_a = params.kernel.constant_value * coupling.mass;

    auto record_errors = [&](double t) {
        double ex = 0.0, ev = 0.0;
        for (std::size_t e = 0; e < n * d; ++e) {
            const double dx = sys.pos[e] - cop.pos[e];
            const double dv = sys.vel[e] - cop.vel[e];
            ex += dx * dx;
            ev += dv * dv;
        }
        times.push_back(t);
        err_x.push_back(ex / static_cast<double>(n));
        err_v.push_back(ev / static_cast<double>(n));
    };
    record_errors(initial.time);

    Prng path_noise(path_seed);
    const double scale = std::sqrt(cfg.dt);
    const double amp = std::sqrt(2.0 * params.sigma);

    for (std::size_t k = 0; k < n_steps; ++k) {
        const double dW = scale * path_noise.normal();

        // copy fields
        if (coupling.field_mode == FieldMode::ExactConstant) {
            if (k == 0) {
                cop_a.assign(n, exact_a);
                cop_b.assign(n * d, 0.0);
            }
        } else {
            if (k % coupling.field_stride == 0) {
                law.refresh_fields(params);
                for (std::size_t i = 0; i < n; ++i) {
                    law.query(params, &cop.pos[i * d], cop_a[i], &cop_b[i * d]);
                }
            }
        }

        // interacting system (fluctuation form: zero noise reference)
        try {
            detail::em_step_into(sys, params, cfg.dt, dW, true, sys_next, scratch, nullptr);
        } catch (const SimulationFault& fault) {
            throw SimulationFault(k + 1, fault.time);
        }

        // mean-field copies, same increment
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < d; ++c) {
                const double x = cop.x(i, c);
                const double v = cop.v(i, c);
                cop_next.x(i, c) = x + v * cfg.dt;
                cop_next.v(i, c) = v - params.kappa * (cop_a[i] * v - cop_b[i * d + c]) * cfg.dt -
                                   x * cfg.dt + amp * v * dW;
            }
        }
        cop_next.time = cop.time + cfg.dt;
        if (!all_finite(cop_next)) throw SimulationFault(k + 1, cop_next.time);

        // advance the law ensemble with its own independent increments
        if (coupling.field_mode == FieldMode::Empirical) {
            for (std::size_t i = 0; i < m_law; ++i) law_dWs[i] = scale * law_noise.normal();
            law.step(params, cfg.dt, law_dWs);
            if (!all_finite(law.state)) throw SimulationFault(k + 1, law.state.time);
        }

        std::swap(sys, sys_next);
        std::swap(cop, cop_next);
        if ((k + 1) % cfg.record_every == 0 || k + 1 == n_steps) {
            record_errors(sys.time);
        }
    }
}

CouplingRecord coupled_run(const ParticleState& initial, const ModelParams& params,
                           const StepConfig& cfg, const CouplingConfig& coupling,
                           std::size_t m_realizations) {
    validate(params);
    validate(cfg);
    if (m_realizations == 0) throw std::invalid_argument("need at least one realization");

    CouplingRecord record;
    record.n = initial.n;
    record.m_realizations = m_realizations;
    record.seed = cfg.seed;

    std::vector<double> times, ex, ev;
    for (std::size_t k = 0; k < m_realizations; ++k) {
        const std::uint64_t base = derive_seed(cfg.seed, k);
        coupled_realization(initial, params, cfg, coupling, derive_seed(base, kStreamPath),
                            derive_seed(base, kStreamLaw), times, ex, ev);
        if (record.times.empty()) {
            record.times = times;
            record.err_x.assign(times.size(), 0.0);
            record.err_v.assign(times.size(), 0.0);
        }
        for (std::size_t i = 0; i < times.size(); ++i) {
            record.err_x[i] += ex[i];
            record.err_v[i] += ev[i];
        }
    }
    double peak = 0.0;
    for (std::size_t i = 0; i < record.times.size(); ++i) {
        record.err_x[i] /= static_cast<double>(m_realizations);
        record.err_v[i] /= static_cast<double>(m_realizations);
        peak = std::max(peak, record.err_x[i] + record.err_v[i]);
    }
    record.degenerate = peak < 1e-20;
    return record;
}

}  // namespace scs
