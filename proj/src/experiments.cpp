#include "cevlab/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "cevlab/brownian.hpp"
#include "cevlab/errors.hpp"

namespace cevlab {

namespace {

constexpr double kZ95 = 1.96;
constexpr int kMaxExponent = 30;

// Runs the stepper along inc from x0, calling visit(k, state_before, result)
// for every step. Returns the terminal value.
template <typename Visit>
double walk(const Stepper& step, double x0, std::span<const double> inc, Visit&& visit) {
    double y = x0;
    for (std::size_t k = 0; k < inc.size(); ++k) {
        const StepResult r = step(y, inc[k]);
        visit(k, y, r);
        y = r.value;
    }
    return y;
}

double terminal(const Stepper& step, double x0, std::span<const double> inc) {
    return walk(step, x0, inc, [](std::size_t, double, const StepResult&) {});
}

void require_paths(std::size_t n_paths) {
    if (n_paths < 2) throw InvalidParams("n_paths must be >= 2 for a standard error");
}

}  // namespace

SampleStats summarize(std::span<const double> samples) {
    SampleStats s;
    const auto n = static_cast<double>(samples.size());
    if (samples.empty()) return s;
    double sum = 0.0;
    for (double v : samples) sum += v;
    s.mean = sum / n;
    if (samples.size() < 2) return s;
    // Shifted by the first sample so constant data has exactly zero spread.
    const double shift = samples.front();
    double dsum = 0.0;
    for (double v : samples) dsum += v - shift;
    const double dmean = dsum / n;
    double ss = 0.0;
    for (double v : samples) ss += (v - shift - dmean) * (v - shift - dmean);
    s.std_error = std::sqrt(ss / (n - 1.0) / n);
    return s;
}

LineFit fit_order(std::span<const ErrorPoint> points) {
    if (points.size() < 2) throw InsufficientPoints("order fit needs at least two points");
    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (const auto& p : points) {
        if (!(p.dt > 0.0) || !(p.rmse > 0.0))
            throw NonPositiveValue("order fit needs positive dt and rmse, got dt=" + std::to_string(p.dt) +
                                   " rmse=" + std::to_string(p.rmse));
        xs.push_back(std::log(p.dt));
        ys.push_back(std::log(p.rmse));
    }
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw InsufficientPoints("order fit needs at least two distinct dt values");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

ConvergenceReport strong_error(const CevParams& params, SchemeId scheme, const LevelSpec& spec, double t_end,
                               const ExecPolicy& exec) {
    params.check();
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidParams("t_end must be finite and > 0");
    require_paths(spec.n_paths);
    if (spec.test_exponents.empty()) throw InvalidParams("at least one test exponent is required");
    if (spec.ref_exponent < 0 || spec.ref_exponent > kMaxExponent)
        throw InvalidParams("ref_exponent must lie in [0, " + std::to_string(kMaxExponent) + "]");
    for (std::size_t i = 0; i < spec.test_exponents.size(); ++i) {
        const int e = spec.test_exponents[i];
        if (e < 0) throw InvalidParams("test exponents must be >= 0");
        if (e > spec.ref_exponent) throw InvalidParams("test exponent " + std::to_string(e) + " exceeds ref_exponent");
        if (i > 0 && e <= spec.test_exponents[i - 1]) throw InvalidParams("test exponents must be strictly ascending");
    }

    const auto level_dt = [&](int e) { return std::ldexp(t_end, -e); };
    if (scheme == SchemeId::SemiDiscrete) {
        const auto check = [&](int e, const char* which) {
            const auto rep = validate_assumption_a(params, level_dt(e));
            if (!rep.feasible) {
                throw InfeasibleLevel(e, level_dt(e), rep.max_step,
                                      std::string(which) + " level e=" + std::to_string(e) + " (dt=" +
                                          std::to_string(level_dt(e)) + ") violates Assumption A" +
                                          (rep.drift_condition_ok ? " (max step " + std::to_string(rep.max_step) + ")"
                                                                  : " (k*l < a*sigma^2/2)"));
            }
        };
        for (int e : spec.test_exponents) check(e, "test");
        check(spec.ref_exponent, "reference");
    }

    const std::size_t n_fine = std::size_t{1} << spec.ref_exponent;
    const double fine_dt = level_dt(spec.ref_exponent);
    const Stepper ref_step(scheme, params, fine_dt);
    std::vector<Stepper> test_steps;
    for (int e : spec.test_exponents) test_steps.emplace_back(scheme, params, level_dt(e));

    const std::size_t n_levels = spec.test_exponents.size();
    const std::size_t n_paths = spec.n_paths;
    std::vector<double> sq(n_levels * n_paths);
    std::vector<double> discrepancy(n_paths, 0.0);

    parallel_for(n_paths, exec, [&](std::size_t p) {
        const auto fine = sample_increments({spec.master_seed, p}, n_fine, fine_dt);
        const double w_fine = fine.terminal();
        const double y_ref = terminal(ref_step, params.x0, fine.values());
        for (std::size_t j = 0; j < n_levels; ++j) {
            const auto coarse = coarsen(fine, std::size_t{1} << (spec.ref_exponent - spec.test_exponents[j]));
            const double gap = std::fabs(coarse.terminal() - w_fine);
            if (gap > 1e-12 * std::max(1.0, std::fabs(w_fine)))
                throw Error("coupling broken: terminal Brownian values differ by " + std::to_string(gap));
            discrepancy[p] = std::max(discrepancy[p], gap);
            const double d = y_ref - terminal(test_steps[j], params.x0, coarse.values());
            sq[j * n_paths + p] = d * d;
        }
    });

    ConvergenceReport report;
    report.theoretical_order = params.a * (params.a - 0.5);
    for (double g : discrepancy) report.max_coupling_discrepancy = std::max(report.max_coupling_discrepancy, g);

    std::vector<ErrorPoint> points;
    for (std::size_t j = 0; j < n_levels; ++j) {
        const auto stats = summarize(std::span<const double>(sq).subspan(j * n_paths, n_paths));
        LevelRecord rec;
        rec.exponent = spec.test_exponents[j];
        rec.dt = level_dt(rec.exponent);
        rec.mse = stats.mean;
        rec.rmse = std::sqrt(stats.mean);
        rec.ci_halfwidth = kZ95 * stats.std_error;
        report.levels.push_back(rec);
        if (rec.rmse > 0.0) points.push_back({rec.dt, rec.rmse});
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.fitted_order = report.fit_intercept = report.fit_r2 = nan;
    if (points.size() >= 2 && points.size() == n_levels) {
        const auto fit = fit_order(points);
        report.fitted_order = fit.slope;
        report.fit_intercept = fit.intercept;
        report.fit_r2 = fit.r2;
    }
    return report;
}

MomentReport moment_check(const CevParams& params, SchemeId scheme, const TimeGrid& grid, std::size_t n_paths,
                          std::uint64_t seed, const ExecPolicy& exec) {
    params.check();
    require_paths(n_paths);
    const Stepper step(scheme, params, grid.dt());
    std::vector<double> x(n_paths), x2(n_paths);
    parallel_for(n_paths, exec, [&](std::size_t p) {
        const auto inc = sample_increments({seed, p}, grid.n_steps(), grid.dt());
        x[p] = terminal(step, params.x0, inc.values());
        x2[p] = x[p] * x[p];
    });
    const auto first = summarize(x);
    const auto second = summarize(x2);
    MomentReport r;
    r.sample_mean = first.mean;
    r.se_mean = first.std_error;
    r.sample_second_moment = second.mean;
    r.se_second = second.std_error;
    r.analytic_mean = analytic_mean(params, grid.t_end());
    r.abs_mean_error = std::fabs(r.sample_mean - r.analytic_mean);
    return r;
}

NegativityStats negativity_stats(const CevParams& params, const TimeGrid& grid, std::size_t n_paths,
                                 std::uint64_t seed, const ExecPolicy& exec) {
    params.check();
    if (n_paths < 1) throw InvalidParams("n_paths must be >= 1");
    const Stepper step(SchemeId::SemiDiscrete, params, grid.dt());

    struct PathTally {
        std::size_t flips = 0;
        std::size_t clamps = 0;
        double max_prob = 0.0;
        double min_state = std::numeric_limits<double>::infinity();
    };
    std::vector<PathTally> tallies(n_paths);
    parallel_for(n_paths, exec, [&](std::size_t p) {
        const auto inc = sample_increments({seed, p}, grid.n_steps(), grid.dt());
        PathTally& t = tallies[p];
        walk(step, params.x0, inc.values(), [&](std::size_t, double y, const StepResult& r) {
            t.max_prob = std::max(t.max_prob, step_negativity_prob(y, grid.dt(), params));
            t.min_state = std::min(t.min_state, y);
            t.flips += r.z_negative ? 1 : 0;
            t.clamps += r.clamped ? 1 : 0;
        });
    });

    NegativityStats s;
    s.total_steps = n_paths * grid.n_steps();
    s.min_visited_state = std::numeric_limits<double>::infinity();
    for (const auto& t : tallies) {
        s.z_negative_events += t.flips;
        s.clamp_events += t.clamps;
        s.max_step_prob = std::max(s.max_step_prob, t.max_prob);
        s.min_visited_state = std::min(s.min_visited_state, t.min_state);
    }
    return s;
}

std::optional<PayoffKind> parse_payoff(std::string_view name) noexcept {
    std::string norm;
    for (char c : name) {
        if (c == '-') c = '_';
        norm.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (norm == "european_call" || norm == "call") return PayoffKind::EuropeanCall;
    if (norm == "european_put" || norm == "put") return PayoffKind::EuropeanPut;
    if (norm == "asian_arithmetic_call" || norm == "asian_call") return PayoffKind::AsianArithmeticCall;
    return std::nullopt;
}

std::string_view to_string(PayoffKind kind) noexcept {
    switch (kind) {
        case PayoffKind::EuropeanCall: return "european_call";
        case PayoffKind::EuropeanPut: return "european_put";
        case PayoffKind::AsianArithmeticCall: return "asian_arithmetic_call";
    }
    return "unknown";
}

PriceEstimate price_payoff(const CevParams& params, const PayoffSpec& payoff, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t seed, const ExecPolicy& exec, SchemeId scheme) {
    params.check();
    require_paths(n_paths);
    if (!(payoff.strike >= 0.0) || !std::isfinite(payoff.strike))
        throw InvalidParams("strike must be finite and >= 0");
    const Stepper step(scheme, params, grid.dt());
    const double strike = payoff.strike;

    std::vector<double> values(n_paths);
    std::vector<unsigned char> negative(n_paths, 0);
    parallel_for(n_paths, exec, [&](std::size_t p) {
        const auto inc = sample_increments({seed, p}, grid.n_steps(), grid.dt());
        double running = 0.0;
        const double x_end = walk(step, params.x0, inc.values(),
                                  [&](std::size_t, double, const StepResult& r) { running += r.value; });
        negative[p] = x_end < 0.0 ? 1 : 0;
        switch (payoff.kind) {
            case PayoffKind::EuropeanCall: values[p] = std::max(x_end - strike, 0.0); break;
            case PayoffKind::EuropeanPut: values[p] = std::max(strike - x_end, 0.0); break;
            case PayoffKind::AsianArithmeticCall:
                values[p] = std::max(running / static_cast<double>(grid.n_steps()) - strike, 0.0);
                break;
        }
    });

    const auto stats = summarize(values);
    PriceEstimate est;
    est.price = stats.mean;
    est.std_error = stats.std_error;
    est.ci_halfwidth = kZ95 * stats.std_error;
    std::size_t neg = 0;
    for (unsigned char b : negative) neg += b;
    est.negative_terminal_fraction = static_cast<double>(neg) / static_cast<double>(n_paths);
    return est;
}

}  // namespace cevlab
