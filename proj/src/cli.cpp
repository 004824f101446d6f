#include "wallenergy/cli.hpp"

#include "wallenergy/constants.hpp"
#include "wallenergy/energy.hpp"
#include "wallenergy/experiments.hpp"
#include "wallenergy/glue.hpp"
#include "wallenergy/inequalities.hpp"
#include "wallenergy/optimize.hpp"
#include "wallenergy/profile.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wallenergy::cli {
namespace {

constexpr const char* kVersion = "0.1.0";

// Shortest representation that parses back to the same double, so header
// lines read naturally and still reproduce the run exactly.
std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// CLI11 happily lexical-casts "nan" and "inf" into double options; the
// commands below want real numbers, so every numeric option gets this.
const CLI::Validator Finite(
    [](std::string& s) -> std::string {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
            return "'" + s + "' is not a finite number";
        return {};
    },
    "FINITE");

// Where a command's CSV goes: the run stream by default, a file named
// after the command when --out-dir is set.
class Sink {
public:
    Sink(const std::string& out_dir, const std::string& name,
         std::ostream& fallback)
        : fallback_(fallback) {
        if (out_dir.empty())
            return;
        std::filesystem::create_directories(out_dir);
        path_ = std::filesystem::path(out_dir) / (name + ".csv");
        file_ = std::make_unique<std::ofstream>(path_);
        if (!*file_)
            throw std::runtime_error("cannot open " + path_.string() +
                                     " for writing");
    }

    std::ostream& stream() { return file_ ? *file_ : fallback_; }
    bool to_file() const { return file_ != nullptr; }
    std::string path() const { return path_.string(); }

private:
    std::ostream& fallback_;
    std::filesystem::path path_;
    std::unique_ptr<std::ofstream> file_;
};

using Header = std::map<std::string, std::string>;

// Every run opens with its resolved configuration, one sorted comment line
// per key, so a CSV is reproducible from its own first lines.
void write_header(std::ostream& os, const std::string& command, Header kv) {
    kv["command"] = command;
    kv["version"] = kVersion;
    for (const auto& [k, v] : kv)
        os << "# " << k << '=' << v << '\n';
}

// Options shared by every subcommand.
struct Common {
    std::uint64_t seed = 42;
    int cells = 0; // 0 keeps the module default
    std::string out_dir;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "RNG seed for sweeps and multistarts");
    cmd->add_option("--cells", c.cells, "resolution override (cells)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out-dir", c.out_dir,
                    "write CSV files here instead of stdout");
}

ConstantsConfig constants_config(const Common& c) {
    ConstantsConfig cfg;
    if (c.cells > 0)
        cfg.n_cells = c.cells;
    cfg.opt.rng_seed = c.seed;
    return cfg;
}

Header constants_header(const ConstantsConfig& cfg, const Common& c) {
    Header kv;
    kv["n_cells"] = std::to_string(cfg.n_cells);
    kv["cells_per_unit"] = std::to_string(cfg.cells_per_unit);
    kv["L_max"] = fmt(cfg.L_max);
    kv["seed"] = std::to_string(c.seed);
    return kv;
}

int run_constant_report(const std::string& name, const Common& c,
                        std::ostream& out) {
    const ConstantsConfig cfg = constants_config(c);
    ConstantsReport report;
    report.n_cells = cfg.n_cells;
    Header kv = constants_header(cfg, c);

    if (name == "compute-alpha") {
        report.alpha = compute_alpha(cfg).alpha;
    } else if (name == "fm-constant") {
        const FmResult fm = compute_fm_constant(cfg);
        report.c_fm = fm.c;
        kv["c_fm_half_domain"] = fmt(fm.c_half);
    } else {
        report.first_order = first_order_constant(cfg).value;
    }

    Sink sink(c.out_dir, name, out);
    write_header(sink.stream(), name, std::move(kv));
    write_constants_csv(sink.stream(), report);
    if (sink.to_file())
        out << "wrote " << sink.path() << '\n';
    return 0;
}

int run_compute_beta(double t, const Common& c, std::ostream& out) {
    const ConstantsConfig cfg = constants_config(c);
    const BetaPoint p = compute_beta(t, BetaRoute::both, cfg);

    Header kv = constants_header(cfg, c);
    kv["t"] = fmt(t);

    Sink sink(c.out_dir, "compute-beta", out);
    write_header(sink.stream(), "compute-beta", std::move(kv));
    write_beta_csv(sink.stream(), {p});
    if (sink.to_file())
        out << "wrote " << sink.path() << '\n';
    return 0;
}

int run_beta_curve(double t_min, double t_max, int steps, bool no_warm,
                   const Common& c, std::ostream& out) {
    const ConstantsConfig cfg = constants_config(c);
    const std::vector<BetaPoint> pts =
        beta_curve(t_min, t_max, steps, cfg, !no_warm);

    Header kv = constants_header(cfg, c);
    kv["t_min"] = fmt(t_min);
    kv["t_max"] = fmt(t_max);
    kv["steps"] = std::to_string(steps);
    kv["warm_start"] = no_warm ? "0" : "1";

    Sink sink(c.out_dir, "beta-curve", out);
    write_header(sink.stream(), "beta-curve", std::move(kv));
    write_beta_csv(sink.stream(), pts);
    if (sink.to_file())
        out << "wrote " << sink.path() << '\n';
    return 0;
}

int run_glue_test(int count, const Common& c, std::ostream& out) {
    // Seeded ensemble over the documented parameter box: amplitudes and
    // slopes in [-2, 2], horizons in [0.1, 10]. Draw order A, m, T.
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    std::uniform_real_distribution<double> horizon(0.1, 10.0);

    std::vector<GlueReport> rows;
    rows.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        GlueSpec spec;
        spec.A = box(rng);
        spec.m = box(rng);
        spec.T = horizon(rng);
        rows.push_back(glue_report(spec));
    }

    Header kv;
    kv["count"] = std::to_string(count);
    kv["seed"] = std::to_string(c.seed);

    Sink sink(c.out_dir, "glue-test", out);
    write_header(sink.stream(), "glue-test", std::move(kv));
    write_glue_csv(sink.stream(), rows);
    if (sink.to_file())
        out << "wrote " << sink.path() << '\n';
    return 0;
}

int run_check_inequalities(int count, const Common& c, std::ostream& out) {
    const int cells = c.cells > 0 ? c.cells : 256;
    const Grid unit(0.0, 1.0, cells);

    std::vector<RatioSample> rows = inter1_sweep(unit, count, c.seed);
    for (RatioSample& r : inter2_sweep(unit, count, c.seed))
        rows.push_back(std::move(r));

    // A shrinking-wall sequence for the small-eps comparison; margins keep
    // the measured window clear of the boundary settling.
    const Grid line(-1.0, 1.0, 2 * cells);
    std::vector<std::pair<HermiteProfile, double>> seq;
    for (double eps : {0.1, 0.05}) {
        seq.emplace_back(
            HermiteProfile::sample(
                line, [eps](double x) { return std::tanh(x / eps); },
                [eps](double x) {
                    const double ch = std::cosh(x / eps);
                    return 1.0 / (eps * ch * ch);
                }),
            eps);
    }
    for (RatioSample& r : inter3_check(seq, 0.3))
        rows.push_back(std::move(r));

    Header kv;
    kv["cells"] = std::to_string(cells);
    kv["count"] = std::to_string(count);
    kv["seed"] = std::to_string(c.seed);

    Sink sink(c.out_dir, "check-inequalities", out);
    write_header(sink.stream(), "check-inequalities", std::move(kv));
    write_ratio_csv(sink.stream(), rows);
    if (sink.to_file())
        out << "wrote " << sink.path() << '\n';
    return 0;
}

void dump_profile(const std::string& out_dir, const std::string& name,
                  const HermiteProfile& p, Header kv, std::ostream& out) {
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / (name + ".csv");
    std::ofstream file(path);
    if (!file)
        throw std::runtime_error("cannot open " + path.string() +
                                 " for writing");
    write_header(file, "profile", std::move(kv));
    write_profile_csv(file, p);
    out << "wrote " << path.string() << '\n';
}

int run_minimize(double eps, bool pinned, double a_eps, double b_eps,
                 bool dump, const Common& c, std::ostream& out) {
    if (dump && c.out_dir.empty())
        throw CLI::ValidationError("--dump-profile requires --out-dir");

    ExperimentSpec spec;
    spec.epsilons = {eps};
    spec.opt.rng_seed = c.seed;
    if (c.cells > 0)
        spec.cells_per_layer = c.cells;

    Header kv;
    kv["eps"] = fmt(eps);
    kv["seed"] = std::to_string(c.seed);
    kv["cells_per_layer"] = std::to_string(spec.cells_per_layer);

    OptResult r{HermiteProfile::constant(Grid(0.0, 1.0, 1), 0.0), 0.0, 0,
                false, 0.0};
    if (pinned) {
        spec.a0 = a_eps;
        spec.b0 = b_eps;
        spec.a_rule = {a_eps, 0.0};
        spec.b_rule = {b_eps, 0.0};
        kv["a_eps"] = fmt(a_eps);
        kv["b_eps"] = fmt(b_eps);
        r = minimize_G(eps, spec);
    } else {
        kv["constraints"] = "free";
        r = minimize_F(eps, study_grid(spec, eps), spec.opt);
    }
    kv["grid_cells"] = std::to_string(r.profile.grid().n_cells);
    kv["converged"] = r.converged ? "1" : "0";
    kv["iterations"] = std::to_string(r.iterations);

    Sink sink(c.out_dir, "minimize", out);
    write_header(sink.stream(), "minimize", kv);
    write_breakdown_csv(sink.stream(), energy_breakdown(r.profile, eps));
    if (sink.to_file())
        out << "wrote " << sink.path() << '\n';

    if (dump)
        dump_profile(c.out_dir, "minimize_profile", r.profile,
                     std::move(kv), out);
    return 0;
}

// --- convergence-study config file ---------------------------------------
// Flat `key = value` lines; '#' starts a comment. Keys: epsilons (comma
// list), a0, b0, a_eps, b_eps (either `const:<v>` or `approach:<v0>,<rate>`),
// cells_per_layer, lp, seed.

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double config_number(const std::string& key, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *trimmed(end).c_str() != '\0' ||
        !std::isfinite(v))
        throw CLI::ValidationError("config key '" + key +
                                   "': '" + s + "' is not a finite number");
    return v;
}

BoundaryRule config_rule(const std::string& key, const std::string& s) {
    const auto colon = s.find(':');
    const std::string kind = trimmed(s.substr(0, colon));
    if (colon == std::string::npos || kind == "const") {
        const std::string v =
            colon == std::string::npos ? s : s.substr(colon + 1);
        return {config_number(key, v), 0.0};
    }
    if (kind == "approach") {
        const std::string rest = s.substr(colon + 1);
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw CLI::ValidationError("config key '" + key +
                                       "': approach needs <v0>,<rate>");
        return {config_number(key, rest.substr(0, comma)),
                config_number(key, rest.substr(comma + 1))};
    }
    throw CLI::ValidationError("config key '" + key + "': unknown rule '" +
                               kind + "' (use const: or approach:)");
}

std::string rule_text(const BoundaryRule& r) {
    if (r.rate == 0.0)
        return "const:" + fmt(r.v0);
    return "approach:" + fmt(r.v0) + "," + fmt(r.rate);
}

ExperimentSpec load_study_config(const std::string& path, Header& kv) {
    std::ifstream file(path);
    if (!file)
        throw CLI::ValidationError("cannot read config file '" + path + "'");

    ExperimentSpec spec;
    bool saw_a_rule = false, saw_b_rule = false;
    std::string line;
    while (std::getline(file, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trimmed(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("config line '" + line +
                                       "' is not key = value");
        const std::string key = trimmed(line.substr(0, eq));
        const std::string value = trimmed(line.substr(eq + 1));

        if (key == "epsilons") {
            spec.epsilons.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ','))
                spec.epsilons.push_back(config_number(key, item));
        } else if (key == "a0") {
            spec.a0 = config_number(key, value);
        } else if (key == "b0") {
            spec.b0 = config_number(key, value);
        } else if (key == "a_eps") {
            spec.a_rule = config_rule(key, value);
            saw_a_rule = true;
        } else if (key == "b_eps") {
            spec.b_rule = config_rule(key, value);
            saw_b_rule = true;
        } else if (key == "cells_per_layer") {
            spec.cells_per_layer =
                static_cast<int>(config_number(key, value));
        } else if (key == "lp") {
            spec.lp = config_number(key, value);
        } else if (key == "seed") {
            spec.opt.rng_seed =
                static_cast<std::uint64_t>(config_number(key, value));
        } else {
            throw CLI::ValidationError("unknown config key '" + key + "'");
        }
    }

    // Data that names no rule of its own sits at its limit for every eps.
    if (!saw_a_rule)
        spec.a_rule = {spec.a0, 0.0};
    if (!saw_b_rule)
        spec.b_rule = {spec.b0, 0.0};

    std::string eps_list;
    for (std::size_t i = 0; i < spec.epsilons.size(); ++i)
        eps_list += (i ? "," : "") + fmt(spec.epsilons[i]);
    kv["epsilons"] = eps_list;
    kv["a0"] = fmt(spec.a0);
    kv["b0"] = fmt(spec.b0);
    kv["a_eps"] = rule_text(spec.a_rule);
    kv["b_eps"] = rule_text(spec.b_rule);
    kv["lp"] = fmt(spec.lp);
    return spec;
}

int run_convergence_study(const std::string& config_path, bool dump,
                          const Common& c, bool seed_given, bool cells_given,
                          std::ostream& out) {
    Header kv;
    ExperimentSpec spec = load_study_config(config_path, kv);
    if (seed_given)
        spec.opt.rng_seed = c.seed;
    if (cells_given && c.cells > 0)
        spec.cells_per_layer = c.cells;
    kv["seed"] = std::to_string(spec.opt.rng_seed);
    kv["cells_per_layer"] = std::to_string(spec.cells_per_layer);
    kv["config"] = config_path;

    if (dump && c.out_dir.empty())
        throw CLI::ValidationError("--dump-profile requires --out-dir");

    const std::vector<ConvergenceRecord> rows = convergence_study(spec);

    Sink sink(c.out_dir, "convergence-study", out);
    write_header(sink.stream(), "convergence-study", kv);
    write_convergence_csv(sink.stream(), rows);
    if (sink.to_file())
        out << "wrote " << sink.path() << '\n';

    if (dump) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].minimizer)
                continue;
            Header pkv = kv;
            pkv["eps"] = fmt(rows[i].eps);
            dump_profile(c.out_dir, "study_profile_" + std::to_string(i),
                         *rows[i].minimizer, std::move(pkv), out);
        }
    }
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"sharp-interface wall energies: constants, bounds, and "
                 "eps-sweep studies"};
    app.require_subcommand(1);

    // compute-alpha / fm-constant / first-order share the report schema.
    Common c_alpha, c_fm, c_first;
    add_common(app.add_subcommand("compute-alpha",
                                  "transition energy constant per unit jump"),
               c_alpha);
    add_common(app.add_subcommand(
                   "fm-constant",
                   "full-line transition constant, with truncation check"),
               c_fm);
    add_common(app.add_subcommand("first-order",
                                  "first-derivative wall constant (8/3)"),
               c_first);

    Common c_beta;
    double beta_t = 0.0;
    CLI::App* beta_cmd =
        app.add_subcommand("compute-beta", "boundary wall energy at one t");
    beta_cmd->add_option("--t", beta_t, "boundary value the wall climbs to")
        ->required()
        ->check(Finite);
    add_common(beta_cmd, c_beta);

    Common c_curve;
    double t_min = 0.0, t_max = 0.0;
    int steps = 0;
    bool no_warm = false;
    CLI::App* curve_cmd =
        app.add_subcommand("beta-curve", "boundary wall energy on a t grid");
    curve_cmd->add_option("--t-min", t_min)->required()->check(Finite);
    curve_cmd->add_option("--t-max", t_max)->required()->check(Finite);
    curve_cmd->add_option("--steps", steps)->required();
    curve_cmd->add_flag("--no-warm-start", no_warm,
                        "solve every point cold (independent solves)");
    add_common(curve_cmd, c_curve);

    Common c_glue;
    int glue_count = 50;
    CLI::App* glue_cmd = app.add_subcommand(
        "glue-test", "seeded sweep of smooth connector bounds");
    glue_cmd->add_option("--count", glue_count, "number of random specs")
        ->check(CLI::PositiveNumber);
    add_common(glue_cmd, c_glue);

    Common c_ineq;
    int ineq_count = 50;
    CLI::App* ineq_cmd = app.add_subcommand(
        "check-inequalities", "measured interpolation ratio ensembles");
    ineq_cmd->add_option("--count", ineq_count, "profiles per ensemble")
        ->check(CLI::PositiveNumber);
    add_common(ineq_cmd, c_ineq);

    Common c_min;
    double min_eps = 0.0, a_eps = 0.0, b_eps = 0.0;
    bool min_dump = false;
    CLI::App* min_cmd = app.add_subcommand(
        "minimize", "minimize one functional instance directly");
    min_cmd->add_option("--eps", min_eps, "layer scale")
        ->required()
        ->check(Finite);
    CLI::Option* a_opt =
        min_cmd->add_option("--a-eps", a_eps, "pinned left value")
            ->check(Finite);
    CLI::Option* b_opt =
        min_cmd->add_option("--b-eps", b_eps, "pinned right value")
            ->check(Finite);
    a_opt->needs(b_opt);
    b_opt->needs(a_opt);
    min_cmd->add_flag("--dump-profile", min_dump,
                      "also write the minimizer nodes (needs --out-dir)");
    add_common(min_cmd, c_min);

    Common c_study;
    std::string config_path;
    bool study_dump = false;
    CLI::App* study_cmd = app.add_subcommand(
        "convergence-study", "eps sweep against the predicted limit");
    study_cmd->add_option("--config", config_path, "key = value study file")
        ->required();
    study_cmd->add_flag("--dump-profile", study_dump,
                        "also write per-eps minimizers (needs --out-dir)");
    add_common(study_cmd, c_study);

    std::vector<std::string> argv_copy(args);
    try {
        // CLI11 consumes the vector back to front.
        std::reverse(argv_copy.begin(), argv_copy.end());
        app.parse(argv_copy);

        if (app.got_subcommand("compute-alpha"))
            return run_constant_report("compute-alpha", c_alpha, out);
        if (app.got_subcommand("fm-constant"))
            return run_constant_report("fm-constant", c_fm, out);
        if (app.got_subcommand("first-order"))
            return run_constant_report("first-order", c_first, out);
        if (app.got_subcommand("compute-beta"))
            return run_compute_beta(beta_t, c_beta, out);
        if (app.got_subcommand("beta-curve"))
            return run_beta_curve(t_min, t_max, steps, no_warm, c_curve,
                                  out);
        if (app.got_subcommand("glue-test"))
            return run_glue_test(glue_count, c_glue, out);
        if (app.got_subcommand("check-inequalities"))
            return run_check_inequalities(ineq_count, c_ineq, out);
        if (app.got_subcommand("minimize"))
            return run_minimize(min_eps, min_cmd->count("--a-eps") > 0,
                                a_eps, b_eps, min_dump, c_min, out);
        if (app.got_subcommand("convergence-study"))
            return run_convergence_study(
                config_path, study_dump, c_study,
                study_cmd->count("--seed") > 0,
                study_cmd->count("--cells") > 0, out);
        err << app.help();
        return 2;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << app.help();
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "argument error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace wallenergy::cli
