#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cevlab/errors.hpp"
#include "cevlab/experiments.hpp"
#include "cevlab/model.hpp"
#include "cevlab/schemes.hpp"

namespace cevlab {

enum class Experiment { Check, Simulate, Convergence, Moments, Negativity, Price };
enum class OutputFormat { Csv, Json };

[[nodiscard]] std::optional<Experiment> parse_experiment(std::string_view name) noexcept;
[[nodiscard]] std::string_view to_string(Experiment e) noexcept;

/// Malformed input. The message names the offending line or flag.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a model or experiment invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    CevParams model;
    double t_end = 1.0;
    std::size_t n_steps = 64;
    Experiment experiment = Experiment::Check;
    SchemeId scheme = SchemeId::SemiDiscrete;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    int ref_exponent = 12;
    std::vector<int> test_exponents{4, 5, 6, 7, 8, 9};
    PayoffSpec payoff{PayoffKind::EuropeanCall, 1.0};
    OutputFormat format = OutputFormat::Csv;
    std::string output_path;  // empty = cevlab-<experiment>.<csv|json>

    [[nodiscard]] TimeGrid grid() const { return TimeGrid(t_end, n_steps); }
    [[nodiscard]] std::string resolved_output_path() const;
    /// Every setting under its canonical `section.key` name, numbers printed
    /// so that parsing them back yields identical values.
    [[nodiscard]] std::map<std::string, std::string> resolved() const;
};

/// One `--section.key=value` override, in command-line order.
struct Override {
    std::string key;
    std::string value;
};

/// Parses a flat `key=value` document (one pair per line, `#` comments) and
/// applies the overrides on top. Keys may be bare (`sigma`) or sectioned
/// (`model.sigma`). A document whose first non-blank character is `{` is read
/// as a JSON report and its `provenance.config` block is used instead.
///
/// Throws ParseError for syntax, unknown or missing keys, and non-finite
/// numbers; ValidationError for invariant violations (see validate()).
[[nodiscard]] RunConfig parse_config(std::string_view text, const std::vector<Override>& overrides = {});

/// Model invariants, Assumption A for SemiDiscrete runs, and experiment
/// constraints (path counts, level structure). Throws ValidationError.
void validate(const RunConfig& config);

/// Renders resolved() as a `key=value` document that parse_config accepts.
[[nodiscard]] std::string to_config_text(const RunConfig& config);

}  // namespace cevlab
