#pragma once

// CSV and JSON renderings of experiment results. CSV uses CRLF line endings
// and %.17g numbers; every JSON document carries a provenance block from
// which the run can be reproduced.

#include <string>
#include <vector>

#include "cevlab/config.hpp"
#include "cevlab/experiments.hpp"
#include "cevlab/model.hpp"
#include "cevlab/schemes.hpp"

namespace cevlab::report {

inline constexpr const char* kConvergenceHeader = "level,dt,mse,rmse,ci95";
inline constexpr const char* kSimulateHeader = "path,step,time,value,z_negative";
inline constexpr const char* kMetricHeader = "metric,value,se";

[[nodiscard]] std::string version();

[[nodiscard]] std::string check_csv(const AssumptionAReport& r);
[[nodiscard]] std::string check_json(const AssumptionAReport& r, const RunConfig& cfg);

[[nodiscard]] std::string simulate_csv(const std::vector<PathResult>& paths);
[[nodiscard]] std::string simulate_json(const std::vector<PathResult>& paths, const RunConfig& cfg);

[[nodiscard]] std::string convergence_csv(const ConvergenceReport& r);
[[nodiscard]] std::string convergence_json(const ConvergenceReport& r, const RunConfig& cfg);

[[nodiscard]] std::string moments_csv(const MomentReport& r);
[[nodiscard]] std::string moments_json(const MomentReport& r, const RunConfig& cfg);

[[nodiscard]] std::string negativity_csv(const NegativityStats& s);
[[nodiscard]] std::string negativity_json(const NegativityStats& s, const RunConfig& cfg);

[[nodiscard]] std::string price_csv(const PriceEstimate& p);
[[nodiscard]] std::string price_json(const PriceEstimate& p, const RunConfig& cfg);

}  // namespace cevlab::report
