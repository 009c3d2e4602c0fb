#pragma once

// Mean-reverting CEV model
//
//     dx_t = k (l - x_t) dt + sigma x_t^a dW_t,    1/2 < a < 1,
//
// together with the quantities the explicit semi-discrete scheme needs:
// the Assumption A feasibility region, the deterministic inner expression
// that gets raised to the power 1-a, and the exact one-step probability
// that the scheme's pre-image z falls below zero.

#include <cstddef>
#include <limits>

namespace cevlab {

struct CevParams {
    double k = 0.0;      // mean-reversion speed
    double l = 0.0;      // long-run level
    double sigma = 0.0;  // diffusion coefficient
    double a = 0.75;     // CEV exponent, strictly inside (1/2, 1)
    double x0 = 1.0;     // initial state, > 0

    /// Throws InvalidParams naming the first violated invariant.
    void check() const;
    [[nodiscard]] bool valid() const noexcept;
};

/// Uniform grid 0 = t_0 < ... < t_n = T.
class TimeGrid {
public:
    TimeGrid(double t_end, std::size_t n_steps);

    [[nodiscard]] double t_end() const noexcept { return t_end_; }
    [[nodiscard]] std::size_t n_steps() const noexcept { return n_steps_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    /// t_k, with time(n_steps()) == t_end() exactly.
    [[nodiscard]] double time(std::size_t k) const noexcept;

private:
    double t_end_;
    std::size_t n_steps_;
    double dt_;
};

struct AssumptionAReport {
    bool feasible = false;
    bool drift_condition_ok = false;  // k l >= a sigma^2 / 2
    bool step_condition_ok = false;   // dt <= 2 / (2k + a sigma^2)
    double max_step = 0.0;            // +inf when k = sigma = 0
    double margin = 0.0;              // k l - a sigma^2 / 2
};

/// Both inequalities are non-strict; equality is feasible.
[[nodiscard]] AssumptionAReport validate_assumption_a(const CevParams& params, double dt);

/// 2 / (2k + a sigma^2), or +inf for the degenerate k = sigma = 0 model.
[[nodiscard]] double max_stable_step(const CevParams& params) noexcept;

/// Relative rounding slack allowed below zero before the inner expression
/// is treated as an Assumption A violation.
inline constexpr double kInnerClampTolerance = 1e-12;

struct InnerValue {
    double value = 0.0;    // >= 0
    bool clamped = false;  // rounding produced a tiny negative that was set to 0
};

/// y (1 - k dt) + dt (k l - a sigma^2 y^{2a-1} / 2).
///
/// Values in [-1e-12 max(1, y), 0) are clamped to zero and flagged; anything
/// more negative throws NegativeInner.
[[nodiscard]] InnerValue inner_value(double y, double dt, const CevParams& params);

/// E x_t = l + (x0 - l) e^{-k t}.
[[nodiscard]] double analytic_mean(const CevParams& params, double t) noexcept;

/// Standard normal CDF via erfc.
[[nodiscard]] double normal_cdf(double x) noexcept;

/// P(sigma (1-a) dW + inner^{1-a} < 0) for dW ~ N(0, dt). Zero when sigma = 0.
[[nodiscard]] double negativity_prob_from_inner(double inner, double dt,
                                                const CevParams& params) noexcept;

/// Same probability with inner = inner_value(y, dt, params).
[[nodiscard]] double step_negativity_prob(double y, double dt, const CevParams& params);

/// x^p for x >= 0 with x = 0 mapped to 0 (p > 0 throughout the model).
[[nodiscard]] double nonneg_pow(double x, double p) noexcept;

}  // namespace cevlab
