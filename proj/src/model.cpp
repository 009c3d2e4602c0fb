#include "cevlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cevlab/errors.hpp"

namespace cevlab {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void CevParams::check() const {
    if (!finite(k) || k < 0.0) throw InvalidParams("k must be finite and >= 0, got " + std::to_string(k));
    if (!finite(l) || l < 0.0) throw InvalidParams("l must be finite and >= 0, got " + std::to_string(l));
    if (!finite(sigma) || sigma < 0.0)
        throw InvalidParams("sigma must be finite and >= 0, got " + std::to_string(sigma));
    if (!finite(a) || !(a > 0.5 && a < 1.0))
        throw InvalidParams("a must lie in (0.5, 1), got " + std::to_string(a));
    if (!finite(x0) || !(x0 > 0.0)) throw InvalidParams("x0 must be finite and > 0, got " + std::to_string(x0));
}

bool CevParams::valid() const noexcept {
    try {
        check();
        return true;
    } catch (const InvalidParams&) {
        return false;
    }
}

TimeGrid::TimeGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_steps_(n_steps) {
    if (!std::isfinite(t_end) || !(t_end > 0.0))
        throw InvalidParams("t_end must be finite and > 0, got " + std::to_string(t_end));
    if (n_steps < 1) throw InvalidParams("n_steps must be >= 1");
    dt_ = t_end_ / static_cast<double>(n_steps_);
}

double TimeGrid::time(std::size_t k) const noexcept {
    if (k >= n_steps_) return t_end_;
    return t_end_ * static_cast<double>(k) / static_cast<double>(n_steps_);
}

double max_stable_step(const CevParams& params) noexcept {
    const double denom = 2.0 * params.k + params.a * params.sigma * params.sigma;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 / denom;
}

AssumptionAReport validate_assumption_a(const CevParams& params, double dt) {
    AssumptionAReport r;
    r.margin = params.k * params.l - 0.5 * params.a * params.sigma * params.sigma;
    r.max_step = max_stable_step(params);
    r.drift_condition_ok = r.margin >= 0.0;
    r.step_condition_ok = dt <= r.max_step;
    r.feasible = r.drift_condition_ok && r.step_condition_ok;
    return r;
}

double nonneg_pow(double x, double p) noexcept {
    if (x == 0.0) return 0.0;
    return std::pow(x, p);
}

InnerValue inner_value(double y, double dt, const CevParams& params) {
    const double half_a_sigma2 = 0.5 * params.a * params.sigma * params.sigma;
    const double value = y * (1.0 - params.k * dt) +
                         dt * (params.k * params.l - half_a_sigma2 * nonneg_pow(y, 2.0 * params.a - 1.0));
    if (value >= 0.0) return {value, false};
    if (value >= -kInnerClampTolerance * std::max(1.0, y)) return {0.0, true};
    throw NegativeInner(y, dt, value);
}

double analytic_mean(const CevParams& params, double t) noexcept {
    if (params.k == 0.0) return params.x0;
    return params.l + (params.x0 - params.l) * std::exp(-params.k * t);
}

double normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double negativity_prob_from_inner(double inner, double dt, const CevParams& params) noexcept {
    if (params.sigma == 0.0) return 0.0;
    const double one_minus_a = 1.0 - params.a;
    const double threshold = nonneg_pow(inner, one_minus_a) / (params.sigma * one_minus_a * std::sqrt(dt));
    return normal_cdf(-threshold);
}

double step_negativity_prob(double y, double dt, const CevParams& params) {
    if (params.sigma == 0.0) return 0.0;
    return negativity_prob_from_inner(inner_value(y, dt, params).value, dt, params);
}

}  // namespace cevlab
