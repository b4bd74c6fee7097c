#include "scs/io.hpp"

#include "scs/diagnostics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace scs {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void config_fail(std::size_t line_no, const std::string& what) {
    std::ostringstream msg;
    msg << "config line " << line_no << ": " << what;
    throw ConfigError(msg.str());
}

bool parse_bool(const std::string& value, std::size_t line_no) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    config_fail(line_no, "expected true/false, got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& value, std::size_t line_no, const char* key) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        config_fail(line_no, std::string(key) + ": expected an unsigned integer, got '" + value + "'");
    }
}

double parse_num(const std::string& value, std::size_t line_no, const char* key) {
    try {
        return parse_double(value);
    } catch (const std::exception&) {
        config_fail(line_no, std::string(key) + ": expected a number, got '" + value + "'");
    }
}

std::vector<std::size_t> parse_size_list(const std::string& value) {
    std::vector<std::size_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t used = 0;
        out.push_back(std::stoull(item, &used));
        if (used != item.size()) throw std::invalid_argument("bad list entry '" + item + "'");
    }
    return out;
}

std::string size_list_to_string(const std::vector<std::size_t>& list) {
    std::string out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(list[i]);
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig config;
    ExperimentSpec& spec = config.experiment;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') config_fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "step" && section != "experiment") {
                config_fail(line_no, "unknown section '" + section + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) config_fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) config_fail(line_no, "empty key");
        if (section.empty()) config_fail(line_no, "key before any [section]");

        try {
            if (section == "model") {
                if (key == "kappa") spec.params.kappa = parse_num(value, line_no, "kappa");
                else if (key == "sigma") spec.params.sigma = parse_num(value, line_no, "sigma");
                else if (key == "kernel") spec.params.kernel = kernel_from_string(value);
                else if (key == "n") spec.params.n = parse_u64(value, line_no, "n");
                else if (key == "dim") spec.params.dim = parse_u64(value, line_no, "dim");
                else if (key == "compensated") spec.params.compensated_sum = parse_bool(value, line_no);
                else config_fail(line_no, "unknown key '" + key + "' in [model]");
            } else if (section == "step") {
                if (key == "dt") spec.cfg.dt = parse_num(value, line_no, "dt");
                else if (key == "t_final") spec.cfg.t_final = parse_num(value, line_no, "t_final");
                else if (key == "record_every") spec.cfg.record_every = parse_u64(value, line_no, "record_every");
                else if (key == "seed") spec.cfg.seed = parse_u64(value, line_no, "seed");
                else config_fail(line_no, "unknown key '" + key + "' in [step]");
            } else {
                if (key == "kind") spec.kind = kind_from_string(value);
                else if (key == "realizations") spec.m_realizations = parse_u64(value, line_no, "realizations");
                else if (key == "box") spec.box_half_width = parse_num(value, line_no, "box");
                else if (key == "project") spec.project_initial = parse_bool(value, line_no);
                else if (key == "mass") spec.mass = parse_num(value, line_no, "mass");
                else if (key == "beta") spec.beta = parse_num(value, line_no, "beta");
                else if (key == "figure") spec.figure_preset = value;
                else if (key == "proxy") spec.moments_proxy = value;
                else if (key == "proxy_size") spec.proxy_size = parse_u64(value, line_no, "proxy_size");
                else if (key == "n_list") spec.sweep = parse_size_list(value);
                else if (key == "t_star") spec.t_star = parse_num(value, line_no, "t_star");
                else if (key == "field_mode") {
                    if (value == "empirical") spec.coupling.field_mode = FieldMode::Empirical;
                    else if (value == "exact-constant") spec.coupling.field_mode = FieldMode::ExactConstant;
                    else config_fail(line_no, "field_mode must be empirical or exact-constant");
                } else if (key == "law_sample_size") {
                    spec.coupling.law_sample_size = parse_u64(value, line_no, "law_sample_size");
                } else if (key == "field_stride") {
                    spec.coupling.field_stride = parse_u64(value, line_no, "field_stride");
                } else if (key == "pin_law_mean") {
                    spec.coupling.pin_law_mean = parse_bool(value, line_no);
                } else if (key == "law_box") {
                    spec.coupling.init_box = parse_num(value, line_no, "law_box");
                } else if (key == "slope_tol") spec.tol.slope_tol = parse_num(value, line_no, "slope_tol");
                else if (key == "pass_fraction") spec.tol.pass_fraction = parse_num(value, line_no, "pass_fraction");
                else if (key == "bound_tol") spec.tol.bound_tol = parse_num(value, line_no, "bound_tol");
                else if (key == "se_slack") spec.tol.se_slack = parse_num(value, line_no, "se_slack");
                else if (key == "figure_ratio") spec.tol.figure_ratio = parse_num(value, line_no, "figure_ratio");
                else config_fail(line_no, "unknown key '" + key + "' in [experiment]");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            config_fail(line_no, e.what());
        }
    }

    spec.coupling.mass = spec.mass;
    try {
        validate(spec.params);
        validate(spec.cfg);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config;
}

std::string serialize_config(const RunConfig& config) {
    const ExperimentSpec& spec = config.experiment;
    std::ostringstream out;
    out << "[model]\n";
    out << "kappa = " << format_double(spec.params.kappa) << "\n";
    out << "sigma = " << format_double(spec.params.sigma) << "\n";
    out << "kernel = " << kernel_to_string(spec.params.kernel) << "\n";
    out << "n = " << spec.params.n << "\n";
    out << "dim = " << spec.params.dim << "\n";
    out << "compensated = " << (spec.params.compensated_sum ? "true" : "false") << "\n";
    out << "\n[step]\n";
    out << "dt = " << format_double(spec.cfg.dt) << "\n";
    out << "t_final = " << format_double(spec.cfg.t_final) << "\n";
    out << "record_every = " << spec.cfg.record_every << "\n";
    out << "seed = " << spec.cfg.seed << "\n";
    out << "\n[experiment]\n";
    out << "kind = " << kind_to_string(spec.kind) << "\n";
    out << "realizations = " << spec.m_realizations << "\n";
    out << "box = " << format_double(spec.box_half_width) << "\n";
    out << "project = " << (spec.project_initial ? "true" : "false") << "\n";
    out << "mass = " << format_double(spec.mass) << "\n";
    if (spec.beta) out << "beta = " << format_double(*spec.beta) << "\n";
    if (!spec.figure_preset.empty()) out << "figure = " << spec.figure_preset << "\n";
    out << "proxy = " << spec.moments_proxy << "\n";
    out << "proxy_size = " << spec.proxy_size << "\n";
    if (!spec.sweep.empty()) out << "n_list = " << size_list_to_string(spec.sweep) << "\n";
    out << "t_star = " << format_double(spec.t_star) << "\n";
    out << "field_mode = "
        << (spec.coupling.field_mode == FieldMode::Empirical ? "empirical" : "exact-constant")
        << "\n";
    out << "law_sample_size = " << spec.coupling.law_sample_size << "\n";
    out << "field_stride = " << spec.coupling.field_stride << "\n";
    out << "pin_law_mean = " << (spec.coupling.pin_law_mean ? "true" : "false") << "\n";
    out << "law_box = " << format_double(spec.coupling.init_box) << "\n";
    out << "slope_tol = " << format_double(spec.tol.slope_tol) << "\n";
    out << "pass_fraction = " << format_double(spec.tol.pass_fraction) << "\n";
    out << "bound_tol = " << format_double(spec.tol.bound_tol) << "\n";
    out << "se_slack = " << format_double(spec.tol.se_slack) << "\n";
    out << "figure_ratio = " << format_double(spec.tol.figure_ratio) << "\n";
    return out.str();
}

namespace {

json params_to_json(const ModelParams& params) {
    return json{{"kappa", params.kappa},
                {"sigma", params.sigma},
                {"kernel", kernel_to_string(params.kernel)},
                {"n", params.n},
                {"dim", params.dim},
                {"compensated", params.compensated_sum}};
}

ModelParams params_from_json(const json& j) {
    ModelParams params;
    params.kappa = j.at("kappa").get<double>();
    params.sigma = j.at("sigma").get<double>();
    params.kernel = kernel_from_string(j.at("kernel").get<std::string>());
    params.n = j.at("n").get<std::size_t>();
    params.dim = j.at("dim").get<std::size_t>();
    params.compensated_sum = j.at("compensated").get<bool>();
    return params;
}

double mean_energy(const ParticleState& s) {
    double sum = 0.0;
    for (std::size_t e = 0; e < s.n * s.dim; ++e) {
        sum += s.pos[e] * s.pos[e] + s.vel[e] * s.vel[e];
    }
    return sum / static_cast<double>(s.n);
}

double fluctuation_sum(const ParticleState& state) {
    auto [macro, centered] = macro_decompose(state);
    const ParticleState& s = centered.state;
    double total = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) {
        double x2 = 0.0, v2 = 0.0;
        for (std::size_t k = 0; k < s.dim; ++k) {
            x2 += s.x(i, k) * s.x(i, k);
            v2 += s.v(i, k) * s.v(i, k);
        }
        total += std::sqrt(x2) + std::sqrt(v2);
    }
    return total;
}

}  // namespace

void write_trajectory(const TrajectoryRecord& record, const fs::path& path) {
    if (record.states.empty()) throw std::invalid_argument("empty trajectory record");
    const std::size_t d = record.states.front().dim;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,particle";
    for (std::size_t k = 0; k < d; ++k) out << ",x" << (k + 1);
    for (std::size_t k = 0; k < d; ++k) out << ",v" << (k + 1);
    out << "\n";
    for (const ParticleState& s : record.states) {
        for (std::size_t i = 0; i < s.n; ++i) {
            out << format_double(s.time) << "," << i;
            for (std::size_t k = 0; k < d; ++k) out << "," << format_double(s.x(i, k));
            for (std::size_t k = 0; k < d; ++k) out << "," << format_double(s.v(i, k));
            out << "\n";
        }
    }
    out.close();

    const ParticleState& last = record.states.back();
    json summary{{"noise_seed", record.noise_seed},
                 {"params", params_to_json(record.params)},
                 {"centered", record.centered},
                 {"overflow_halted", record.overflow_halted},
                 {"halt_step", record.halt_step},
                 {"max_pair_distance", record.max_pair_distance},
                 {"kernel_domain_exceeded", record.kernel_domain_exceeded},
                 {"snapshots", record.states.size()},
                 {"final", json{{"time", last.time},
                                {"fluctuation_sum", fluctuation_sum(last)},
                                {"mean_energy", mean_energy(last)}}}};
    std::ofstream side(path.string() + ".json", std::ios::binary);
    if (!side) throw std::runtime_error("cannot write " + path.string() + ".json");
    side << summary.dump(2) << "\n";
}

TrajectoryRecord read_trajectory(const fs::path& path) {
    std::ifstream side(path.string() + ".json");
    if (!side) throw std::runtime_error("cannot read " + path.string() + ".json");
    json summary;
    side >> summary;

    TrajectoryRecord record;
    record.noise_seed = summary.at("noise_seed").get<std::uint64_t>();
    record.params = params_from_json(summary.at("params"));
    record.centered = summary.at("centered").get<bool>();
    record.overflow_halted = summary.at("overflow_halted").get<bool>();
    record.halt_step = summary.at("halt_step").get<std::size_t>();
    record.max_pair_distance = summary.at("max_pair_distance").get<double>();
    record.kernel_domain_exceeded = summary.at("kernel_domain_exceeded").get<bool>();

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trajectory " + path.string());
    const std::size_t d = record.params.dim;

    ParticleState current;
    std::size_t row_in_state = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 2 + 2 * d) throw std::runtime_error("bad trajectory row");
        if (row_in_state == 0) {
            current = make_state(record.params.n, d);
            current.time = parse_double(cells[0]);
        }
        for (std::size_t k = 0; k < d; ++k) {
            current.x(row_in_state, k) = parse_double(cells[2 + k]);
            current.v(row_in_state, k) = parse_double(cells[2 + d + k]);
        }
        if (++row_in_state == record.params.n) {
            record.times.push_back(current.time);
            record.states.push_back(current);
            row_in_state = 0;
        }
    }
    if (row_in_state != 0) throw std::runtime_error("truncated trajectory " + path.string());
    return record;
}

void write_diagnostics_csv(const TrajectoryRecord& record, const LyapunovParams& lp, double mass,
                           const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,S,lyapunov_V,generator_LV,L_std,L_tilde\n";
    const double eps = default_cross_epsilon(record.params, mass, record.params.dim);
    ModelParams params = record.params;
    for (const ParticleState& s : record.states) {
        auto [macro, centered] = macro_decompose(s);
        params.n = s.n;
        const double v = lyapunov_v(centered, lp);
        const double lv = generator_lv(centered, params, lp);
        const auto funcs = variance_functionals(sample_from_state(s, mass), eps);
        out << format_double(s.time) << "," << format_double(fluctuation_sum(s)) << ","
            << format_double(v) << "," << format_double(lv) << "," << format_double(funcs.l_std)
            << "," << format_double(funcs.l_tilde) << "\n";
    }
}

void write_verdict_json(const Verdict& verdict, const fs::path& path) {
    json j{{"kind", kind_to_string(verdict.kind)},
           {"pass", verdict.pass},
           {"measured", verdict.measured},
           {"expected", verdict.expected},
           {"flags", verdict.flags},
           {"artifacts", verdict.artifacts}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf);
}

}  // namespace

void write_manifest(const fs::path& outdir, const RunConfig& config,
                    const std::vector<std::string>& files) {
    const std::string canonical = serialize_config(config);
    {
        std::ofstream out(outdir / "config_canonical.ini", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write config_canonical.ini");
        out << canonical;
    }

    std::vector<std::string> names = files;
    names.push_back("config_canonical.ini");
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    json entries = json::array();
    for (const auto& name : names) {
        const std::string bytes = read_file(outdir / name);
        entries.push_back(json{{"name", name},
                               {"bytes", bytes.size()},
                               {"fnv1a64", hex64(fnv1a64(bytes))}});
    }
    json manifest{{"seed", config.experiment.cfg.seed},
                  {"config_fnv1a64", hex64(fnv1a64(canonical))},
                  {"files", entries}};
    std::ofstream out(outdir / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest.json");
    out << manifest.dump(2) << "\n";

    // wall clock lives outside the deterministic manifest
    std::ofstream ts(outdir / "timestamp.txt", std::ios::binary);
    ts << std::time(nullptr) << "\n";
}

}  // namespace scs
