#pragma once

#include "scs/diagnostics.hpp"
#include "scs/engine.hpp"
#include "scs/model.hpp"
#include "scs/sample.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace scs {

struct FieldEstimate {
    double a = 0.0;          // integral psi(|x - y|) f
    std::vector<double> b;   // integral v psi(|x - y|) f
};

// a = sum_k w_k psi(|x - y_k|), b = sum_k w_k psi(|x - y_k|) v_k.
FieldEstimate empirical_fields(std::span<const double> x, const WeightedPhaseSample& law,
                               const KernelSpec& kernel);

struct PhasePoint {
    std::vector<double> x;
    std::vector<double> v;
};

// Euler-Maruyama update of one mean-field copy:
//   x' = x + v dt,  v' = v - kappa (a v - b) dt - x dt + sqrt(2 sigma) v dW.
PhasePoint mckean_step(const PhasePoint& copy, const FieldEstimate& fields,
                       const ModelParams& params, double dt, double dW);

// Ensemble of independent mean-field copies; structurally a particle state.
struct McKeanEnsemble {
    ParticleState copies;
};

struct McKeanRunConfig {
    double mass = 1.0;
    std::size_t field_stride = 1;  // re-estimate fields every this many steps
    // Re-center the ensemble each step: the centered law has exactly zero
    // mean for all time, while the empirical mean of independently-driven
    // copies is re-excited at O(M^-1/2) and then amplified by the undamped
    // mean-oscillator mode. Off for runs that measure the mean oscillation.
    bool pin_mean = true;
};

struct McKeanTrajectory {
    std::vector<double> times;
    std::vector<McKeanEnsemble> snapshots;
    std::uint64_t seed = 0;
};

// Bulk-synchronous self-consistent run: per step, each copy's fields come
// from the leave-one-out empirical law of the current ensemble; copies carry
// mutually independent Brownian paths. Requires M >= 2.
McKeanTrajectory self_consistent_mckean(const McKeanEnsemble& initial, const ModelParams& params,
                                        const StepConfig& cfg, const McKeanRunConfig& run);

struct McKeanConstants {
    double epsilon = 0.0;  // min{1/2, (k psi_m mass - s) / (4 ((k psi_M mass)^2 + 1))}
    double eta = 0.0;      // min{eps/2, (k psi_m mass - s)/4}
    double delta = 0.0;    // (k psi_m mass - s) / k
    double lambda = 0.0;   // (2/delta + 4 eps k) k psi_M^2 mass M2
    double c_star = 0.0;   // min{C_m, eta}
    bool hypotheses_hold = false;  // k psi_m mass > d sigma
};

McKeanConstants mckean_constants(const ModelParams& params, double mass,
                                 double f0_second_moment);

enum class FieldMode {
    Empirical,      // auxiliary self-consistent ensemble of size M
    ExactConstant,  // constant kernel, centered-in-law f0: a = c mass, b = 0
};

struct CouplingConfig {
    FieldMode field_mode = FieldMode::Empirical;
    std::size_t law_sample_size = 1024;  // M
    std::size_t field_stride = 1;
    bool pin_law_mean = true;
    double mass = 1.0;
    double init_box = 1.0;  // half-width of the law ensemble's initial box
};

struct CouplingRecord {
    std::vector<double> times;
    std::vector<double> err_x;  // E |x_i - xbar_i|^2, averaged over i and realizations
    std::vector<double> err_v;
    std::size_t n = 0;
    std::size_t m_realizations = 0;
    std::uint64_t seed = 0;
    bool degenerate = false;  // errors at rounding level throughout
};

// Synchronous coupling: the interacting fluctuation system and one mean-field
// copy per particle share the single scalar Brownian path and the initial
// configuration; copy fields per CouplingConfig. Averaged over m realizations
// of the noise (the initial configuration stays fixed).
CouplingRecord coupled_run(const ParticleState& initial, const ModelParams& params,
                           const StepConfig& cfg, const CouplingConfig& coupling,
                           std::size_t m_realizations);

// Single coupled realization from explicit seeds; err series written to
// err_x/err_v at the record stride. Used by coupled_run and the mean-field
// experiments (which redraw initials per realization).
void coupled_realization(const ParticleState& initial, const ModelParams& params,
                         const StepConfig& cfg, const CouplingConfig& coupling,
                         std::uint64_t path_seed, std::uint64_t law_seed,
                         std::vector<double>& times, std::vector<double>& err_x,
                         std::vector<double>& err_v);

}  // namespace scs
