#include "cevlab/app.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <vector>

#include "cevlab/brownian.hpp"
#include "cevlab/report.hpp"

namespace cevlab {

namespace {

constexpr const char* kUsage =
    "usage: cevlab <check|simulate|convergence|moments|negativity|price>\n"
    "              [--config <file>] [--dry-run] [--section.key=value ...] [--out=<path>]\n"
    "\n"
    "  --config <file>   key=value config file, or a JSON report to rerun\n"
    "  --dry-run         validate and print the resolved config, then exit\n"
    "  --model.k=1       override any config key (model.*, grid.*, experiment.*, output.*)\n"
    "  --out=<path>      report path ('-' for stdout)\n"
    "\n"
    "Exit codes: 0 ok, 1 usage, 2 validation, 3 runtime numerical error.\n"
    "CEVLAB_THREADS caps worker threads; results do not depend on it.\n";

void emit(const RunConfig& cfg, const std::string& body, std::ostream& out) {
    const auto path = cfg.resolved_output_path();
    if (path == "-") {
        out << body;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cannot open output file '" + path + "'");
    file << body;
    if (!file) throw Error("failed writing output file '" + path + "'");
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

std::string execute(const RunConfig& cfg, std::ostream& out) {
    const bool json = cfg.format == OutputFormat::Json;
    const auto target = " -> " + cfg.resolved_output_path();
    switch (cfg.experiment) {
        case Experiment::Check: {
            const auto r = validate_assumption_a(cfg.model, cfg.t_end / static_cast<double>(cfg.n_steps));
            emit(cfg, json ? report::check_json(r, cfg) : report::check_csv(r), out);
            return std::string("check: feasible=") + (r.feasible ? "true" : "false") + " max_step=" +
                   fmt(r.max_step) + " margin=" + fmt(r.margin) + target;
        }
        case Experiment::Simulate: {
            const auto grid = cfg.grid();
            std::vector<PathResult> paths;
            paths.reserve(cfg.n_paths);
            std::size_t flips = 0;
            double min_value = cfg.model.x0;
            for (std::size_t p = 0; p < cfg.n_paths; ++p) {
                const auto inc = sample_increments({cfg.seed, p}, grid.n_steps(), grid.dt());
                paths.push_back(simulate_path(cfg.scheme, cfg.model, grid, inc));
                flips += paths.back().sign_flip_count;
                min_value = std::min(min_value, paths.back().min_value);
            }
            emit(cfg, json ? report::simulate_json(paths, cfg) : report::simulate_csv(paths), out);
            return "simulate: paths=" + std::to_string(paths.size()) + " steps=" + std::to_string(grid.n_steps()) +
                   " min_value=" + fmt(min_value) + " z_negative=" + std::to_string(flips) + target;
        }
        case Experiment::Convergence: {
            LevelSpec spec{cfg.ref_exponent, cfg.test_exponents, cfg.n_paths, cfg.seed};
            const auto r = strong_error(cfg.model, cfg.scheme, spec, cfg.t_end);
            emit(cfg, json ? report::convergence_json(r, cfg) : report::convergence_csv(r), out);
            return "convergence: fitted_order=" + fmt(r.fitted_order) + " r2=" + fmt(r.fit_r2) +
                   " theoretical_order=" + fmt(r.theoretical_order) + target;
        }
        case Experiment::Moments: {
            const auto r = moment_check(cfg.model, cfg.scheme, cfg.grid(), cfg.n_paths, cfg.seed);
            emit(cfg, json ? report::moments_json(r, cfg) : report::moments_csv(r), out);
            return "moments: mean=" + fmt(r.sample_mean) + " (se " + fmt(r.se_mean) + ") analytic=" +
                   fmt(r.analytic_mean) + " second_moment=" + fmt(r.sample_second_moment) + target;
        }
        case Experiment::Negativity: {
            const auto s = negativity_stats(cfg.model, cfg.grid(), cfg.n_paths, cfg.seed);
            emit(cfg, json ? report::negativity_json(s, cfg) : report::negativity_csv(s), out);
            return "negativity: steps=" + std::to_string(s.total_steps) + " z_negative=" +
                   std::to_string(s.z_negative_events) + " clamps=" + std::to_string(s.clamp_events) +
                   " max_step_prob=" + fmt(s.max_step_prob) + target;
        }
        case Experiment::Price: {
            const auto p = price_payoff(cfg.model, cfg.payoff, cfg.grid(), cfg.n_paths, cfg.seed, {}, cfg.scheme);
            emit(cfg, json ? report::price_json(p, cfg) : report::price_csv(p), out);
            return "price: " + std::string(to_string(cfg.payoff.kind)) + " strike=" + fmt(cfg.payoff.strike) +
                   " price=" + fmt(p.price) + " +/- " + fmt(p.ci_halfwidth) + target;
        }
    }
    return {};
}

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const auto summary = execute(config, out);
        (config.resolved_output_path() == "-" ? err : out) << summary << '\n';
        return kExitOk;
    } catch (const InvalidParams& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const AssumptionViolation& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const InfeasibleLevel& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    std::optional<std::string> experiment;
    std::optional<std::string> config_path;
    std::vector<Override> overrides;
    bool dry_run = false;

    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--help" || a == "-h") {
            out << kUsage;
            return kExitOk;
        }
        if (a == "--dry-run") {
            dry_run = true;
        } else if (a == "--config") {
            if (i + 1 >= args.size()) {
                err << "--config needs a file argument\n" << kUsage;
                return kExitUsage;
            }
            config_path = args[++i];
        } else if (starts_with(a, "--config=")) {
            config_path = a.substr(9);
        } else if (a == "--out") {
            if (i + 1 >= args.size()) {
                err << "--out needs a path argument\n" << kUsage;
                return kExitUsage;
            }
            overrides.push_back({"output.path", args[++i]});
        } else if (starts_with(a, "--")) {
            const auto eq = a.find('=');
            if (eq == std::string::npos || eq == 2) {
                err << "malformed flag '" << a << "' (expected --section.key=value)\n" << kUsage;
                return kExitUsage;
            }
            overrides.push_back({a.substr(2, eq - 2), a.substr(eq + 1)});
        } else if (!experiment) {
            experiment = a;
        } else {
            err << "unexpected argument '" << a << "'\n" << kUsage;
            return kExitUsage;
        }
    }

    if (!experiment) {
        err << "missing experiment\n" << kUsage;
        return kExitUsage;
    }
    if (!parse_experiment(*experiment)) {
        err << "unknown experiment '" << *experiment << "'\n" << kUsage;
        return kExitUsage;
    }
    overrides.insert(overrides.begin(), Override{"experiment", *experiment});

    std::string text;
    if (config_path) {
        std::ifstream file(*config_path, std::ios::binary);
        if (!file) {
            err << "cannot read config file '" << *config_path << "'\n";
            return kExitUsage;
        }
        std::ostringstream buf;
        buf << file.rdbuf();
        text = buf.str();
    }

    RunConfig cfg;
    try {
        cfg = parse_config(text, overrides);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    }

    if (dry_run) {
        out << to_config_text(cfg);
        return kExitOk;
    }
    return run(cfg, out, err);
}

}  // namespace cevlab
