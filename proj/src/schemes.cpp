#include "cevlab/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cevlab/errors.hpp"

namespace cevlab {

std::optional<SchemeId> parse_scheme(std::string_view name) noexcept {
    std::string norm;
    norm.reserve(name.size());
    for (char c : name) {
        if (c == '-') c = '_';
        norm.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (norm == "semidiscrete" || norm == "semi_discrete") return SchemeId::SemiDiscrete;
    if (norm == "euler_naive") return SchemeId::EulerNaive;
    if (norm == "euler_full_truncation") return SchemeId::EulerFullTruncation;
    if (norm == "euler_reflected") return SchemeId::EulerReflected;
    return std::nullopt;
}

std::string_view to_string(SchemeId id) noexcept {
    switch (id) {
        case SchemeId::SemiDiscrete: return "semidiscrete";
        case SchemeId::EulerNaive: return "euler_naive";
        case SchemeId::EulerFullTruncation: return "euler_full_truncation";
        case SchemeId::EulerReflected: return "euler_reflected";
    }
    return "unknown";
}

Stepper::Stepper(SchemeId scheme, const CevParams& params, double dt) : scheme_(scheme), params_(params), dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw GridMismatch("step size must be finite and > 0");
    if (scheme == SchemeId::SemiDiscrete) {
        const auto report = validate_assumption_a(params, dt);
        if (!report.feasible) {
            throw AssumptionViolation(
                "Assumption A violated: " +
                std::string(report.drift_condition_ok ? "" : "k*l < a*sigma^2/2; ") +
                (report.step_condition_ok ? "" : "dt=" + std::to_string(dt) + " exceeds max step " +
                                                      std::to_string(report.max_step)));
        }
    }
    kl_dt_ = params.k * params.l * dt;
    decay_ = 1.0 - params.k * dt;
    half_a_s2_dt_ = 0.5 * params.a * params.sigma * params.sigma * dt;
    drift_power_ = 2.0 * params.a - 1.0;
    one_minus_a_ = 1.0 - params.a;
    inv_one_minus_a_ = 1.0 / one_minus_a_;
    noise_scale_ = params.sigma * one_minus_a_;
}

StepResult Stepper::operator()(double y, double dw) const {
    return scheme_ == SchemeId::SemiDiscrete ? semidiscrete(y, dw) : euler(y, dw);
}

StepResult Stepper::semidiscrete(double y, double dw) const {
    double inner = y * decay_ + (kl_dt_ - half_a_s2_dt_ * nonneg_pow(y, drift_power_));
    bool clamped = false;
    if (inner < 0.0) {
        if (inner < -kInnerClampTolerance * std::max(1.0, y)) throw NegativeInner(y, dt_, inner);
        inner = 0.0;
        clamped = true;
    }
    // No noise: |inner^{1-a}|^{1/(1-a)} is inner itself.
    if (noise_scale_ == 0.0) return {inner, false, clamped};
    const double z = noise_scale_ * dw + nonneg_pow(inner, one_minus_a_);
    return {nonneg_pow(std::fabs(z), inv_one_minus_a_), z < 0.0, clamped};
}

StepResult Stepper::euler(double x, double dw) const {
    const double k = params_.k;
    const double l = params_.l;
    const double s = params_.sigma;
    const double a = params_.a;
    switch (scheme_) {
        case SchemeId::EulerNaive: {
            const double next = x + (k * l - k * x) * dt_ + s * nonneg_pow(std::fabs(x), a) * dw;
            return {next, next < 0.0, false};
        }
        case SchemeId::EulerFullTruncation: {
            const double xp = std::max(x, 0.0);
            const double next = x + (k * l - k * xp) * dt_ + s * nonneg_pow(xp, a) * dw;
            return {next, next < 0.0, false};
        }
        case SchemeId::EulerReflected: {
            const double raw = x + (k * l - k * x) * dt_ + s * nonneg_pow(std::fabs(x), a) * dw;
            return {std::fabs(raw), raw < 0.0, false};
        }
        case SchemeId::SemiDiscrete: break;
    }
    throw std::logic_error("euler stepper used with a non-Euler scheme");
}

StepResult semidiscrete_step(double y, double dt, double dw, const CevParams& params) {
    return Stepper(SchemeId::SemiDiscrete, params, dt)(y, dw);
}

double euler_step(SchemeId variant, double x, double dt, double dw, const CevParams& params) {
    if (variant == SchemeId::SemiDiscrete) throw std::invalid_argument("euler_step needs an Euler variant");
    return Stepper(variant, params, dt)(x, dw).value;
}

PathResult simulate_path(SchemeId scheme, const CevParams& params, const TimeGrid& grid, const IncrementArray& inc) {
    params.check();
    if (inc.size() != grid.n_steps())
        throw GridMismatch("increment count " + std::to_string(inc.size()) + " != grid steps " +
                           std::to_string(grid.n_steps()));
    if (std::fabs(inc.dt() - grid.dt()) > 1e-12 * grid.dt())
        throw GridMismatch("increment dt " + std::to_string(inc.dt()) + " != grid dt " + std::to_string(grid.dt()));

    const Stepper step(scheme, params, grid.dt());
    const std::size_t n = grid.n_steps();
    PathResult out;
    out.times.resize(n + 1);
    out.values.resize(n + 1);
    out.z_negative.resize(n);
    out.values[0] = params.x0;
    out.times[0] = 0.0;
    out.min_value = params.x0;
    for (std::size_t k = 0; k < n; ++k) {
        const StepResult r = step(out.values[k], inc[k]);
        out.values[k + 1] = r.value;
        out.times[k + 1] = grid.time(k + 1);
        out.z_negative[k] = r.z_negative;
        out.sign_flip_count += r.z_negative ? 1 : 0;
        out.clamp_count += r.clamped ? 1 : 0;
        out.min_value = std::min(out.min_value, r.value);
    }
    return out;
}

}  // namespace cevlab
