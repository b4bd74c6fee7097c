#pragma once

#include "scs/model.hpp"
#include "scs/sample.hpp"
#include "scs/state.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace scs {

struct LyapunovParams {
    double alpha = 1.0;  // fixed to 1 for the decay-rate statements
    double beta = 0.5;
};

// V = alpha sum |x_i|^2 + beta sum x_i . v_i + sum |v_i|^2
double lyapunov_v(const CenteredState& state, const LyapunovParams& lp);

// Exact Ito generator applied to V on the fluctuation system (no upper
// bounds taken):
//   (2k/N) SS psi (v_j - v_i).v_i + (k beta/N) SS psi (v_j - v_i).x_i
//   + (2 alpha - 2) sum x.v + (beta + 2 sigma) sum |v|^2 - beta sum |x|^2
double generator_lv(const CenteredState& state, const ModelParams& params,
                    const LyapunovParams& lp);

struct FlockingReport {
    bool condition_holds = false;  // kappa psi_min > sigma, strictly
    double psi_min = 0.0;
    double psi_max = 0.0;
    // set only when the condition holds
    std::optional<double> beta_max;       // min{1, (2k psi_m - 2s)/(1 + k^2 psi_M^2)}
    std::optional<double> beta_used;      // default beta_max / 2
    std::optional<double> rate_a;         // min{2k psi_m - 2s - (1 + k^2 psi_M^2) beta, beta/2}
    std::optional<double> as_decay_rate;  // a / 3
};

FlockingReport flocking_check(const ModelParams& params,
                              std::optional<double> beta = std::nullopt);

struct VarianceFunctionals {
    double l_std = 0.0;    // integral (|x-x_c|^2 + |v-v_c|^2) f
    double l_tilde = 0.0;  // with 1/2 weights and the epsilon cross term
    double epsilon = 0.0;
};

VarianceFunctionals variance_functionals(const WeightedPhaseSample& sample, double epsilon);

// The cross-term weight used by the decay estimate:
// min{1/2, (k psi_m mass - d sigma) / (2 (1 + 2 (k psi_M)^2))}.
double default_cross_epsilon(const ModelParams& params, double mass, std::size_t dim);

enum class KineticRegime { Decay, Growth, Indeterminate };

struct KineticRegimeReport {
    KineticRegime regime = KineticRegime::Indeterminate;
    double mass = 1.0;
    std::optional<double> c_m;    // Decay: min{1/4, (k psi_m mass - d s)/(4 (1 + 2 (k psi_M)^2))}
    std::optional<double> c_big;  // Growth: min{-(1 + 2 (k psi_M)^2) eps, (d s - k psi_M mass)/2}
    double growth_epsilon = 0.0;  // eps = max{-1/2, k psi_M mass - d s}
    // the two published forms of c_big coincide iff eps = -1/2 binds
    bool c_big_formulas_agree = true;
};

KineticRegimeReport kinetic_regime(const ModelParams& params, double mass, std::size_t dim);

struct SecondMoments {
    double xx = 0.0;
    double xv = 0.0;
    double vv = 0.0;
};

// Closed per-coordinate second-moment ODE of the constant-kernel fluctuation
// system, integrated by fixed-step RK4 (dt = 1e-4):
//   dExx = 2 Exv,  dExv = Evv - Exx - k Exv,  dEvv = -2 (k - s) Evv - 2 Exv
// with k = kappa * c. Unsupported for non-constant kernels.
SecondMoments moment_ode_oracle(const ModelParams& params, const SecondMoments& initial, double t);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

// Least squares of ln y against t on window [t_lo, t_hi]. Requires >= 10
// points in the window and y > 0 (domain_error naming the first offender).
RateFit rate_fit(std::span<const double> times, std::span<const double> values,
                 double t_lo, double t_hi);

}  // namespace scs
