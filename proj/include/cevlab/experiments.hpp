#pragma once

// Monte Carlo harness around the schemes: coupled strong-error measurement
// with log-log order fit, moment diagnostics, sign-flip statistics, and a
// small payoff pricer. Paths may run on any number of threads; every
// reduction is done afterwards in path-index order, so results depend only
// on the inputs and the master seed.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cevlab/model.hpp"
#include "cevlab/parallel.hpp"
#include "cevlab/schemes.hpp"

namespace cevlab {

/// Reference step T/2^ref_exponent; test steps T/2^e for each test exponent.
struct LevelSpec {
    int ref_exponent = 12;
    std::vector<int> test_exponents{4, 5, 6, 7, 8, 9};
    std::size_t n_paths = 10000;
    std::uint64_t master_seed = 1;
};

struct LevelRecord {
    int exponent = 0;
    double dt = 0.0;
    double mse = 0.0;  // mean over paths of (y_ref(T) - y_dt(T))^2
    double rmse = 0.0;
    double ci_halfwidth = 0.0;  // 95% normal-approximation CI on mse
};

struct ConvergenceReport {
    std::vector<LevelRecord> levels;  // dt descending
    double fitted_order = 0.0;        // NaN when fewer than two positive rmse values
    double fit_intercept = 0.0;
    double fit_r2 = 0.0;
    double theoretical_order = 0.0;   // a (a - 1/2)
    double max_coupling_discrepancy = 0.0;  // max |W_T(level) - W_T(ref)| over paths and levels
};

/// Strong error at t_end of each test level against the same scheme on the
/// reference grid, both driven by one fine Brownian path per path index.
/// Throws InfeasibleLevel (SemiDiscrete only) naming the first level outside
/// Assumption A.
[[nodiscard]] ConvergenceReport strong_error(const CevParams& params, SchemeId scheme, const LevelSpec& spec,
                                             double t_end, const ExecPolicy& exec = {});

struct ErrorPoint {
    double dt = 0.0;
    double rmse = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares of ln(rmse) on ln(dt).
[[nodiscard]] LineFit fit_order(std::span<const ErrorPoint> points);

struct SampleStats {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n)
};

/// Mean and standard error, summed in index order.
[[nodiscard]] SampleStats summarize(std::span<const double> samples);

struct MomentReport {
    double sample_mean = 0.0;
    double sample_second_moment = 0.0;
    double se_mean = 0.0;
    double se_second = 0.0;
    double analytic_mean = 0.0;
    double abs_mean_error = 0.0;
};

[[nodiscard]] MomentReport moment_check(const CevParams& params, SchemeId scheme, const TimeGrid& grid,
                                        std::size_t n_paths, std::uint64_t seed, const ExecPolicy& exec = {});

struct NegativityStats {
    std::size_t total_steps = 0;
    std::size_t z_negative_events = 0;
    std::size_t clamp_events = 0;
    double max_step_prob = 0.0;     // max of step_negativity_prob over visited states
    double min_visited_state = 0.0;
};

/// SemiDiscrete sign-flip and clamp counts with the analytic per-step
/// probability evaluated at every visited state.
[[nodiscard]] NegativityStats negativity_stats(const CevParams& params, const TimeGrid& grid, std::size_t n_paths,
                                               std::uint64_t seed, const ExecPolicy& exec = {});

enum class PayoffKind { EuropeanCall, EuropeanPut, AsianArithmeticCall };

[[nodiscard]] std::optional<PayoffKind> parse_payoff(std::string_view name) noexcept;
[[nodiscard]] std::string_view to_string(PayoffKind kind) noexcept;

struct PayoffSpec {
    PayoffKind kind = PayoffKind::EuropeanCall;
    double strike = 0.0;
};

struct PriceEstimate {
    double price = 0.0;
    double std_error = 0.0;
    double ci_halfwidth = 0.0;  // 1.96 * std_error
    double negative_terminal_fraction = 0.0;
};

/// Undiscounted Monte Carlo payoff average. The Asian payoff averages the n
/// right-endpoint values y_{t_1}..y_{t_n}, excluding x0.
[[nodiscard]] PriceEstimate price_payoff(const CevParams& params, const PayoffSpec& payoff, const TimeGrid& grid,
                                         std::size_t n_paths, std::uint64_t seed, const ExecPolicy& exec = {},
                                         SchemeId scheme = SchemeId::SemiDiscrete);

}  // namespace cevlab
