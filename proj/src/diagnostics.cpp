#include "scs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scs {

double lyapunov_v(const CenteredState& state, const LyapunovParams& lp) {
    const ParticleState& s = state.state;
    check_shape(s);
    double xx = 0.0, xv = 0.0, vv = 0.0;
    for (std::size_t e = 0; e < s.n * s.dim; ++e) {
        xx += s.pos[e] * s.pos[e];
        xv += s.pos[e] * s.vel[e];
        vv += s.vel[e] * s.vel[e];
    }
    return lp.alpha * xx + lp.beta * xv + vv;
}

double generator_lv(const CenteredState& state, const ModelParams& params,
                    const LyapunovParams& lp) {
    const ParticleState& s = state.state;
    check_shape(s);
    const std::size_t n = s.n;
    const std::size_t d = s.dim;

    double sum_vv = 0.0;  // SS psi_ij (v_j - v_i) . v_i
    double sum_xv = 0.0;  // SS psi_ij (v_j - v_i) . x_i
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double r2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double dx = s.x(j, k) - s.x(i, k);
                r2 += dx * dx;
            }
            const double psi = kernel_eval_sq(params.kernel, r2);
            double dv_dot_v = 0.0, dv_dot_x = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double dv = s.v(j, k) - s.v(i, k);
                dv_dot_v += dv * s.v(i, k);
                dv_dot_x += dv * s.x(i, k);
            }
            sum_vv += psi * dv_dot_v;
            sum_xv += psi * dv_dot_x;
        }
    }

    double xx = 0.0, xv = 0.0, vv = 0.0;
    for (std::size_t e = 0; e < n * d; ++e) {
        xx += s.pos[e] * s.pos[e];
        xv += s.pos[e] * s.vel[e];
        vv += s.vel[e] * s.vel[e];
    }

    const double invn = 1.0 / static_cast<double>(n);
    return 2.0 * params.kappa * invn * sum_vv + params.kappa * lp.beta * invn * sum_xv +
           (2.0 * lp.alpha - 2.0) * xv + (lp.beta + 2.0 * params.sigma) * vv - lp.beta * xx;
}

FlockingReport flocking_check(const ModelParams& params, std::optional<double> beta) {
    validate(params);
    FlockingReport report;
    report.psi_min = params.kernel.psi_min;
    report.psi_max = params.kernel.psi_max;
    const double k = params.kappa;
    const double s = params.sigma;
    report.condition_holds = k * report.psi_min > s;
    if (!report.condition_holds) return report;

    const double denom = 1.0 + k * k * report.psi_max * report.psi_max;
    const double beta_max = std::min(1.0, (2.0 * k * report.psi_min - 2.0 * s) / denom);
    report.beta_max = beta_max;
    const double b = beta ? *beta : beta_max / 2.0;
    if (!(b > 0.0) || b >= beta_max) {
        throw std::invalid_argument("beta must lie in (0, beta_max)");
    }
    report.beta_used = b;
    const double a = std::min(2.0 * k * report.psi_min - 2.0 * s - denom * b, b / 2.0);
    report.rate_a = a;
    report.as_decay_rate = a / 3.0;
    return report;
}

VarianceFunctionals variance_functionals(const WeightedPhaseSample& sample, double epsilon) {
    const std::size_t m = sample.size();
    if (m == 0) throw std::invalid_argument("variance functionals need a nonempty sample");
    const std::size_t d = sample.dim;
    if (sample.pos.size() != m * d || sample.vel.size() != m * d) {
        throw std::invalid_argument("sample shape mismatch");
    }

    const double mass = total_mass(sample);
    if (!(mass > 0.0)) throw std::invalid_argument("sample mass must be positive");

    std::vector<double> x_c(d, 0.0), v_c(d, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            x_c[k] += sample.weights[i] * sample.pos[i * d + k];
            v_c[k] += sample.weights[i] * sample.vel[i * d + k];
        }
    }
    for (std::size_t k = 0; k < d; ++k) {
        x_c[k] /= mass;
        v_c[k] /= mass;
    }

    VarianceFunctionals out;
    out.epsilon = epsilon;
    double cross = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double dx2 = 0.0, dv2 = 0.0, dxdv = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double dx = sample.pos[i * d + k] - x_c[k];
            const double dv = sample.vel[i * d + k] - v_c[k];
            dx2 += dx * dx;
            dv2 += dv * dv;
            dxdv += dx * dv;
        }
        out.l_std += sample.weights[i] * (dx2 + dv2);
        cross += sample.weights[i] * dxdv;
    }
    out.l_tilde = 0.5 * out.l_std + epsilon * cross;
    return out;
}

double default_cross_epsilon(const ModelParams& params, double mass, std::size_t dim) {
    const double g = params.kappa * params.kernel.psi_min * mass -
                     static_cast<double>(dim) * params.sigma;
    const double h = params.kappa * params.kernel.psi_max;
    return std::min(0.5, g / (2.0 * (1.0 + 2.0 * h * h)));
}

KineticRegimeReport kinetic_regime(const ModelParams& params, double mass, std::size_t dim) {
    validate(params);
    if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
    KineticRegimeReport report;
    report.mass = mass;
    const double k = params.kappa;
    const double s = params.sigma;
    const double pm = params.kernel.psi_min;
    const double pM = params.kernel.psi_max;
    const double ds = static_cast<double>(dim) * s;
    const double h2 = 1.0 + 2.0 * (k * pM) * (k * pM);

    if (k * pm * mass > ds) {
        report.regime = KineticRegime::Decay;
        report.c_m = std::min(0.25, (k * pm * mass - ds) / (4.0 * h2));
    } else if (k * pM * mass < ds) {
        report.regime = KineticRegime::Growth;
        const double eps = std::max(-0.5, k * pM * mass - ds);
        report.growth_epsilon = eps;
        const double from_proof = std::min(-h2 * eps, (ds - k * pM * mass) / 2.0);
        const double from_statement = std::min(h2 / 2.0, (ds - k * pM * mass) / 2.0);
        report.c_big = from_proof;
        report.c_big_formulas_agree = from_proof == from_statement;
    } else {
        report.regime = KineticRegime::Indeterminate;
    }
    return report;
}

namespace {

SecondMoments moment_rhs(const SecondMoments& m, double k, double s) {
    return {2.0 * m.xv, m.vv - m.xx - k * m.xv, -2.0 * (k - s) * m.vv - 2.0 * m.xv};
}

SecondMoments axpy(const SecondMoments& m, double h, const SecondMoments& d) {
    return {m.xx + h * d.xx, m.xv + h * d.xv, m.vv + h * d.vv};
}

}  // namespace

SecondMoments moment_ode_oracle(const ModelParams& params, const SecondMoments& initial,
                                double t) {
    if (params.kernel.kind != KernelKind::Constant) {
        throw std::invalid_argument("moment oracle supports constant kernels only");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("oracle time must be nonnegative and finite");
    }
    const double k = params.kappa * params.kernel.constant_value;
    const double s = params.sigma;
    const double h = 1e-4;
    const std::size_t n = static_cast<std::size_t>(std::llround(t / h));

    SecondMoments m = initial;
    for (std::size_t i = 0; i < n; ++i) {
        const SecondMoments k1 = moment_rhs(m, k, s);
        const SecondMoments k2 = moment_rhs(axpy(m, 0.5 * h, k1), k, s);
        const SecondMoments k3 = moment_rhs(axpy(m, 0.5 * h, k2), k, s);
        const SecondMoments k4 = moment_rhs(axpy(m, h, k3), k, s);
        m.xx += (h / 6.0) * (k1.xx + 2.0 * k2.xx + 2.0 * k3.xx + k4.xx);
        m.xv += (h / 6.0) * (k1.xv + 2.0 * k2.xv + 2.0 * k3.xv + k4.xv);
        m.vv += (h / 6.0) * (k1.vv + 2.0 * k2.vv + 2.0 * k3.vv + k4.vv);
    }
    return m;
}

RateFit rate_fit(std::span<const double> times, std::span<const double> values,
                 double t_lo, double t_hi) {
    if (times.size() != values.size()) {
        throw std::invalid_argument("rate_fit: times/values length mismatch");
    }
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(values[i] > 0.0)) {
            std::ostringstream msg;
            msg << "rate_fit: nonpositive value at index " << i << " (t = " << times[i] << ")";
            throw std::domain_error(msg.str());
        }
        const double y = std::log(values[i]);
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
        syy += y * y;
        ++count;
    }
    if (count < 10) {
        throw std::invalid_argument("rate_fit: need at least 10 points in the window");
    }
    const double nc = static_cast<double>(count);
    const double denom = nc * stt - st * st;
    if (denom == 0.0) throw std::invalid_argument("rate_fit: degenerate time window");

    RateFit fit;
    fit.points = count;
    fit.slope = (nc * sty - st * sy) / denom;
    fit.intercept = (sy - fit.slope * st) / nc;
    const double ss_tot = syy - sy * sy / nc;
    const double ss_res = ss_tot - fit.slope * (sty - st * sy / nc);
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace scs
