#pragma once

#include "scs/diagnostics.hpp"
#include "scs/engine.hpp"
#include "scs/mckean.hpp"
#include "scs/model.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scs {

enum class ExperimentKind {
    FlockingDecay,
    PaperFigure,
    KineticMoments,
    McKeanDecay,
    MeanFieldSweep,
    UniformInTime,
};

std::string kind_to_string(ExperimentKind kind);
ExperimentKind kind_from_string(const std::string& text);

struct Tolerances {
    double slope_tol = 0.02;     // slack added to the -a/3 slope threshold
    double pass_fraction = 0.95; // share of realizations that must pass (a.s. claims)
    double bound_tol = 0.15;     // relative slack on kinetic bound comparisons
    double se_slack = 1.0;       // standard-error multiples for monotonicity
    double figure_ratio = 1e-6;  // required S(t_final)/S(0) for figure presets
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::FlockingDecay;
    ModelParams params;
    StepConfig cfg;
    Tolerances tol;

    std::size_t m_realizations = 10;
    double box_half_width = 1.0;
    bool project_initial = true;
    double mass = 1.0;
    std::optional<double> beta;  // FlockingDecay: Lyapunov cross weight

    std::string figure_preset;   // PaperFigure: "fig1" | "fig2"

    std::string moments_proxy = "mckean";  // KineticMoments: "mckean" | "particles"
    std::size_t proxy_size = 2048;         // N or M for the kinetic proxy

    std::vector<std::size_t> sweep;  // MeanFieldSweep: strictly increasing N values
    double t_star = 1.0;             // MeanFieldSweep: comparison time

    CouplingConfig coupling;  // MeanFieldSweep / UniformInTime
};

void validate(const ExperimentSpec& spec);

struct Verdict {
    ExperimentKind kind = ExperimentKind::FlockingDecay;
    bool pass = false;
    std::map<std::string, double> measured;
    std::map<std::string, double> expected;
    std::vector<std::string> flags;
    std::vector<std::string> artifacts;  // files written under the output dir
};

// All runners refuse (std::invalid_argument) outside their certified
// hypotheses instead of silently downgrading. outdir may be empty = no files.
Verdict run_flocking_decay(const ExperimentSpec& spec, const std::filesystem::path& outdir);
Verdict run_paper_figure(const ExperimentSpec& spec, const std::filesystem::path& outdir);
Verdict run_kinetic_moments(const ExperimentSpec& spec, const std::filesystem::path& outdir);
Verdict run_mckean_decay(const ExperimentSpec& spec, const std::filesystem::path& outdir);
Verdict run_meanfield_sweep(const ExperimentSpec& spec, const std::filesystem::path& outdir);
Verdict run_uniform_in_time(const ExperimentSpec& spec, const std::filesystem::path& outdir);

Verdict run_experiment(const ExperimentSpec& spec, const std::filesystem::path& outdir);

// Re-derives pass/fail from the emitted series CSV + verdict.json; must agree
// with the in-process verdict.
bool recompute_pass(ExperimentKind kind, const std::filesystem::path& outdir);

// Acceptance presets (pinned parameters).
ExperimentSpec preset_flocking_decay();
ExperimentSpec preset_paper_figure(const std::string& name);  // fig1 | fig2
ExperimentSpec preset_kinetic_decay();
ExperimentSpec preset_kinetic_growth();
ExperimentSpec preset_mckean_decay();
ExperimentSpec preset_meanfield_sweep();
ExperimentSpec preset_uniform_in_time();

}  // namespace scs
