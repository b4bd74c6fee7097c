#pragma once

#include "scs/engine.hpp"
#include "scs/experiments.hpp"
#include "scs/fmt.hpp"
#include "scs/model.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace scs {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Full run configuration as read from a config file plus CLI overrides.
struct RunConfig {
    ExperimentSpec experiment;  // carries ModelParams + StepConfig + knobs
};

// Line-oriented `[section]` / `key = value` format; '#' and ';' start
// comments. Unknown sections or keys are hard errors with line numbers;
// missing keys take the documented defaults.
RunConfig parse_config(const std::string& text);

// Canonical form: every key, fixed order, shortest round-trip decimals.
// parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

// CSV `t,particle,x1..xd,v1..vd`, one row per (snapshot, particle), plus a
// sidecar `<path>.json` with seed, params and final diagnostics.
void write_trajectory(const TrajectoryRecord& record, const std::filesystem::path& path);
TrajectoryRecord read_trajectory(const std::filesystem::path& path);

// Diagnostics series of a centered run: t,S,lyapunov_V,generator_LV,L_std,L_tilde.
void write_diagnostics_csv(const TrajectoryRecord& record, const LyapunovParams& lp,
                           double mass, const std::filesystem::path& path);

void write_verdict_json(const Verdict& verdict, const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& bytes);

// manifest.json: seed, canonical config, and per-file byte counts + FNV-1a64
// content hashes, sorted by name. Deterministic; wall-clock goes to a
// separate timestamp.txt that the manifest does not list.
void write_manifest(const std::filesystem::path& outdir, const RunConfig& config,
                    const std::vector<std::string>& files);

// Exit codes: 0 success/pass, 1 verdict fail or simulation fault, 2 config error.
int cli_main(int argc, const char* const* argv);

}  // namespace scs
