#include "scs/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace scs {

namespace {

namespace fs = std::filesystem;

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::string kernel;
    std::string n_list;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<double> kappa, sigma, dt, t_final, beta, box;
    std::optional<std::uint64_t> n, dim, realizations, record_every;
    bool centered = false;
};

void apply_overrides(RunConfig& config, const CliOptions& opts) {
    ExperimentSpec& spec = config.experiment;
    if (opts.seed) spec.cfg.seed = *opts.seed;
    if (opts.kappa) spec.params.kappa = *opts.kappa;
    if (opts.sigma) spec.params.sigma = *opts.sigma;
    if (opts.dt) spec.cfg.dt = *opts.dt;
    if (opts.t_final) spec.cfg.t_final = *opts.t_final;
    if (opts.beta) spec.beta = *opts.beta;
    if (opts.box) spec.box_half_width = *opts.box;
    if (opts.n) spec.params.n = *opts.n;
    if (opts.dim) spec.params.dim = *opts.dim;
    if (opts.realizations) spec.m_realizations = *opts.realizations;
    if (opts.record_every) spec.cfg.record_every = *opts.record_every;
    if (!opts.kernel.empty()) spec.params.kernel = kernel_from_string(opts.kernel);
    if (!opts.n_list.empty()) {
        std::vector<std::size_t> list;
        std::stringstream ss(opts.n_list);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            list.push_back(std::stoull(item));
        }
        spec.sweep = list;
    }
    spec.coupling.mass = spec.mass;
    validate(spec.params);
    validate(spec.cfg);
}

void print_verdict(const Verdict& verdict, std::ostream& out) {
    out << kind_to_string(verdict.kind) << ": " << (verdict.pass ? "PASS" : "FAIL") << "\n";
    for (const auto& [key, value] : verdict.measured) {
        out << "  measured " << key << " = " << format_double(value) << "\n";
    }
    for (const auto& [key, value] : verdict.expected) {
        out << "  expected " << key << " = " << format_double(value) << "\n";
    }
    for (const auto& flag : verdict.flags) {
        out << "  flag " << flag << "\n";
    }
}

int finish_experiment(const Verdict& verdict, RunConfig& config, const fs::path& outdir) {
    print_verdict(verdict, std::cout);
    write_manifest(outdir, config, verdict.artifacts);
    return verdict.pass ? 0 : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"stochastic interacting-particle flocking simulator in a harmonic trap"};
    app.require_subcommand(1);
    CliOptions opts;

    auto add_common = [&opts](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "config file ([model]/[step]/[experiment])");
        sub->add_option("--seed", opts.seed, "base seed (64-bit)");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--n", opts.n, "population count");
        sub->add_option("--dim", opts.dim, "spatial dimension");
        sub->add_option("--kappa", opts.kappa, "coupling strength");
        sub->add_option("--sigma", opts.sigma, "noise intensity");
        sub->add_option("--kernel", opts.kernel,
                        "communication weight: constant:<c> | algebraic-quarter[:R] | table:r,psi:...");
        sub->add_option("--dt", opts.dt, "time step");
        sub->add_option("--t-final", opts.t_final, "time horizon");
        sub->add_option("--record-every", opts.record_every, "snapshot stride");
        sub->add_option("--realizations", opts.realizations, "Monte Carlo realizations");
        sub->add_option("--beta", opts.beta, "Lyapunov cross-term weight");
        sub->add_option("--box", opts.box, "initial box half-width");
        return sub;
    };

    auto* sim = add_common(app.add_subcommand("simulate", "run one trajectory"));
    sim->add_flag("--centered", opts.centered, "simulate the fluctuation system");
    auto* chk = add_common(
        app.add_subcommand("check-flocking", "flocking condition report (+ decay run with --realizations)"));
    add_common(app.add_subcommand("moments", "kinetic variance bound experiment"));
    add_common(app.add_subcommand("mckean", "mean-field copy decay experiment"));
    auto* mf = add_common(app.add_subcommand("meanfield", "coupling error sweep over N"));
    mf->add_option("--n-list", opts.n_list, "comma-separated sweep populations");
    add_common(app.add_subcommand("uniform", "long-horizon coupling error experiment"));
    auto* pre = add_common(app.add_subcommand("preset", "canned trajectory-collapse runs"));
    pre->add_option("--preset", opts.preset, "fig1 | fig2");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig config;
        if (app.got_subcommand("preset")) {
            if (opts.preset != "fig1" && opts.preset != "fig2") {
                throw ConfigError("preset requires --preset fig1 or --preset fig2");
            }
            config.experiment = preset_paper_figure(opts.preset);
        } else if (!opts.config_path.empty()) {
            config = parse_config(read_file_or_throw(opts.config_path));
        }
        apply_overrides(config, opts);
        ExperimentSpec& spec = config.experiment;
        const fs::path outdir(opts.out_dir);

        if (app.got_subcommand("simulate")) {
            fs::create_directories(outdir);
            const std::uint64_t base = derive_seed(spec.cfg.seed, 0);
            const ParticleState init =
                init_uniform(spec.params.n, spec.params.dim, spec.box_half_width,
                             derive_seed(base, kStreamInit), spec.project_initial || opts.centered);
            StepConfig cfg_run = spec.cfg;
            cfg_run.seed = derive_seed(base, kStreamPath);
            const TrajectoryRecord record = simulate(init, spec.params, cfg_run, opts.centered);
            write_trajectory(record, outdir / "trajectory.csv");
            LyapunovParams lp{1.0, spec.beta.value_or(0.5)};
            write_diagnostics_csv(record, lp, spec.mass, outdir / "diagnostics.csv");
            write_manifest(outdir, config,
                           {"trajectory.csv", "trajectory.csv.json", "diagnostics.csv"});
            if (record.overflow_halted) {
                std::cout << "halted: velocity overflow guard at step " << record.halt_step << "\n";
            }
            std::cout << "wrote " << (outdir / "trajectory.csv").string() << " ("
                      << record.states.size() << " snapshots)\n";
            return 0;
        }

        if (app.got_subcommand("check-flocking")) {
            const FlockingReport report = flocking_check(spec.params, spec.beta);
            std::cout << "condition_holds=" << (report.condition_holds ? "true" : "false") << "\n";
            std::cout << "psi_min=" << format_double(report.psi_min) << "\n";
            std::cout << "psi_max=" << format_double(report.psi_max) << "\n";
            if (report.condition_holds) {
                std::cout << "beta_max=" << format_double(*report.beta_max) << "\n";
                std::cout << "beta_used=" << format_double(*report.beta_used) << "\n";
                std::cout << "rate_a=" << format_double(*report.rate_a) << "\n";
                std::cout << "as_decay_rate=" << format_double(*report.as_decay_rate) << "\n";
            }
            if (opts.realizations && *opts.realizations > 0) {
                spec.kind = ExperimentKind::FlockingDecay;
                fs::create_directories(outdir);
                return finish_experiment(run_flocking_decay(spec, outdir), config, outdir);
            }
            return 0;
        }

        if (app.got_subcommand("moments")) spec.kind = ExperimentKind::KineticMoments;
        if (app.got_subcommand("mckean")) spec.kind = ExperimentKind::McKeanDecay;
        if (app.got_subcommand("meanfield")) {
            spec.kind = ExperimentKind::MeanFieldSweep;
            if (spec.sweep.empty()) spec.sweep = {8, 16, 32, 64};
        }
        if (app.got_subcommand("uniform")) spec.kind = ExperimentKind::UniformInTime;
        if (app.got_subcommand("preset")) spec.kind = ExperimentKind::PaperFigure;

        fs::create_directories(outdir);
        return finish_experiment(run_experiment(spec, outdir), config, outdir);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SimulationFault& e) {
        std::cerr << "simulation fault: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace scs
