#include "cevlab/report.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

#ifndef CEVLAB_VERSION
#define CEVLAB_VERSION "0.0.0"
#endif

namespace cevlab::report {

namespace {

using nlohmann::json;

constexpr const char* kEol = "\r\n";

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

// Non-finite values have no JSON literal; they become null.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct MetricRow {
    std::string name;
    std::string value;
    std::string se;
};

std::string metric_csv(const std::vector<MetricRow>& rows) {
    std::string out = std::string(kMetricHeader) + kEol;
    for (const auto& r : rows) out += r.name + ',' + r.value + ',' + r.se + kEol;
    return out;
}

json envelope(const RunConfig& cfg, json result) {
    json prov;
    prov["config"] = cfg.resolved();
    prov["master_seed"] = cfg.seed;
    prov["version"] = version();
    return json{{"experiment", std::string(to_string(cfg.experiment))},
                {"result", std::move(result)},
                {"provenance", std::move(prov)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string version() { return std::string("cevlab ") + CEVLAB_VERSION; }

std::string check_csv(const AssumptionAReport& r) {
    return metric_csv({{"feasible", r.feasible ? "1" : "0", ""},
                       {"drift_condition_ok", r.drift_condition_ok ? "1" : "0", ""},
                       {"step_condition_ok", r.step_condition_ok ? "1" : "0", ""},
                       {"max_step", num(r.max_step), ""},
                       {"margin", num(r.margin), ""}});
}

std::string check_json(const AssumptionAReport& r, const RunConfig& cfg) {
    return dump(envelope(cfg, {{"feasible", r.feasible},
                               {"drift_condition_ok", r.drift_condition_ok},
                               {"step_condition_ok", r.step_condition_ok},
                               {"max_step", jnum(r.max_step)},
                               {"margin", jnum(r.margin)}}));
}

std::string simulate_csv(const std::vector<PathResult>& paths) {
    std::string out = std::string(kSimulateHeader) + kEol;
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto& path = paths[p];
        for (std::size_t k = 0; k < path.values.size(); ++k) {
            // z_negative on row k refers to the step that produced values[k].
            const bool flag = k > 0 && path.z_negative[k - 1];
            out += std::to_string(p) + ',' + std::to_string(k) + ',' + num(path.times[k]) + ',' + num(path.values[k]) +
                   ',' + (flag ? '1' : '0') + kEol;
        }
    }
    return out;
}

std::string simulate_json(const std::vector<PathResult>& paths, const RunConfig& cfg) {
    json arr = json::array();
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto& path = paths[p];
        std::vector<int> flags(path.z_negative.begin(), path.z_negative.end());
        arr.push_back({{"path", p},
                       {"times", path.times},
                       {"values", path.values},
                       {"z_negative", flags},
                       {"sign_flip_count", path.sign_flip_count},
                       {"clamp_count", path.clamp_count},
                       {"min_value", jnum(path.min_value)}});
    }
    return dump(envelope(cfg, {{"scheme", std::string(to_string(cfg.scheme))}, {"paths", std::move(arr)}}));
}

std::string convergence_csv(const ConvergenceReport& r) {
    std::string out = std::string(kConvergenceHeader) + kEol;
    for (const auto& lv : r.levels)
        out += std::to_string(lv.exponent) + ',' + num(lv.dt) + ',' + num(lv.mse) + ',' + num(lv.rmse) + ',' +
               num(lv.ci_halfwidth) + kEol;
    return out;
}

std::string convergence_json(const ConvergenceReport& r, const RunConfig& cfg) {
    json levels = json::array();
    for (const auto& lv : r.levels)
        levels.push_back({{"level", lv.exponent},
                          {"dt", lv.dt},
                          {"mse", lv.mse},
                          {"rmse", lv.rmse},
                          {"ci95", lv.ci_halfwidth}});
    return dump(envelope(cfg, {{"levels", std::move(levels)},
                               {"fitted_order", jnum(r.fitted_order)},
                               {"fit_intercept", jnum(r.fit_intercept)},
                               {"fit_r2", jnum(r.fit_r2)},
                               {"theoretical_order", r.theoretical_order},
                               {"max_coupling_discrepancy", r.max_coupling_discrepancy}}));
}

std::string moments_csv(const MomentReport& r) {
    return metric_csv({{"mean", num(r.sample_mean), num(r.se_mean)},
                       {"second_moment", num(r.sample_second_moment), num(r.se_second)},
                       {"analytic_mean", num(r.analytic_mean), ""},
                       {"abs_mean_error", num(r.abs_mean_error), ""}});
}

std::string moments_json(const MomentReport& r, const RunConfig& cfg) {
    return dump(envelope(cfg, {{"sample_mean", r.sample_mean},
                               {"se_mean", r.se_mean},
                               {"sample_second_moment", r.sample_second_moment},
                               {"se_second", r.se_second},
                               {"analytic_mean", r.analytic_mean},
                               {"abs_mean_error", r.abs_mean_error}}));
}

std::string negativity_csv(const NegativityStats& s) {
    return metric_csv({{"total_steps", std::to_string(s.total_steps), ""},
                       {"z_negative_events", std::to_string(s.z_negative_events), ""},
                       {"clamp_events", std::to_string(s.clamp_events), ""},
                       {"max_step_prob", num(s.max_step_prob), ""},
                       {"min_visited_state", num(s.min_visited_state), ""}});
}

std::string negativity_json(const NegativityStats& s, const RunConfig& cfg) {
    return dump(envelope(cfg, {{"total_steps", s.total_steps},
                               {"z_negative_events", s.z_negative_events},
                               {"clamp_events", s.clamp_events},
                               {"max_step_prob", s.max_step_prob},
                               {"min_visited_state", jnum(s.min_visited_state)}}));
}

std::string price_csv(const PriceEstimate& p) {
    return metric_csv({{"price", num(p.price), num(p.std_error)},
                       {"ci95", num(p.ci_halfwidth), ""},
                       {"negative_terminal_fraction", num(p.negative_terminal_fraction), ""}});
}

std::string price_json(const PriceEstimate& p, const RunConfig& cfg) {
    return dump(envelope(cfg, {{"price", p.price},
                               {"se", p.std_error},
                               {"ci95", p.ci_halfwidth},
                               {"negative_terminal_fraction", p.negative_terminal_fraction}}));
}

}  // namespace cevlab::report
