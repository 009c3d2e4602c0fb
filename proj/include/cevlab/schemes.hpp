#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cevlab/brownian.hpp"
#include "cevlab/model.hpp"

namespace cevlab {

enum class SchemeId {
    SemiDiscrete,         // explicit positivity-preserving scheme
    EulerNaive,           // x + (kl - kx) dt + sigma |x|^a dW
    EulerFullTruncation,  // state replaced by max(x, 0) inside both coefficients
    EulerReflected,       // |x + (kl - kx) dt + sigma |x|^a dW|
};

/// Accepts "semidiscrete", "euler_naive", "euler_full_truncation",
/// "euler_reflected" (case-insensitive, '-' and '_' interchangeable).
[[nodiscard]] std::optional<SchemeId> parse_scheme(std::string_view name) noexcept;
[[nodiscard]] std::string_view to_string(SchemeId id) noexcept;

struct StepResult {
    double value = 0.0;
    // SemiDiscrete: z = sigma (1-a) dW + inner^{1-a} was negative.
    // Euler variants: the raw (pre-reflection) update was negative.
    bool z_negative = false;
    bool clamped = false;
};

/// y_{k+1} = | sigma (1-a) dW + inner(y_k)^{1-a} |^{1/(1-a)}.
/// Throws AssumptionViolation if (params, dt) is outside Assumption A.
[[nodiscard]] StepResult semidiscrete_step(double y, double dt, double dw, const CevParams& params);

/// One step of an Euler baseline. Throws std::invalid_argument for SemiDiscrete.
[[nodiscard]] double euler_step(SchemeId variant, double x, double dt, double dw, const CevParams& params);

/// One-step map with the per-(params, dt) constants hoisted out of the loop.
class Stepper {
public:
    /// Throws AssumptionViolation for SemiDiscrete outside Assumption A.
    Stepper(SchemeId scheme, const CevParams& params, double dt);

    [[nodiscard]] StepResult operator()(double y, double dw) const;
    [[nodiscard]] SchemeId scheme() const noexcept { return scheme_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }

private:
    StepResult semidiscrete(double y, double dw) const;
    StepResult euler(double x, double dw) const;

    SchemeId scheme_;
    CevParams params_;
    double dt_;
    double kl_dt_;
    double decay_;          // 1 - k dt
    double half_a_s2_dt_;   // a sigma^2 dt / 2
    double drift_power_;    // 2a - 1
    double one_minus_a_;
    double inv_one_minus_a_;
    double noise_scale_;    // sigma (1-a)
};

struct PathResult {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<bool> z_negative;  // per step, size n
    std::size_t sign_flip_count = 0;
    std::size_t clamp_count = 0;
    double min_value = 0.0;
};

/// Iterates the scheme over the grid driven by inc.
/// Throws GridMismatch if inc does not match the grid.
[[nodiscard]] PathResult simulate_path(SchemeId scheme, const CevParams& params, const TimeGrid& grid,
                                       const IncrementArray& inc);

}  // namespace cevlab
