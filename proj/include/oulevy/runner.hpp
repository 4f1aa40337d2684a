#pragma once

#include <optional>
#include <string>

#include "oulevy/config.hpp"

namespace oulevy {

inline constexpr const char* kVersion = "oulevy-0.1.0";

struct RunOptions {
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    int workers = 1;
    double tol_scale = 1.0;  // scales deterministic tolerances, not MC bands
};

// Dispatches one subcommand, writes reports under the output directory, and
// returns the process exit code: 0 all checks pass, 1 a check failed.
// Parse problems throw ConfigError (exit 2 in the CLI); semantic rejections
// throw invalid_argument / NotExponentiallyStable / ConstantsUnavailable
// (exit 3).  Output bytes depend only on (config, seed); worker count and
// scheduling never change them.
int run_scenario(const ScenarioConfig& cfg, const std::string& subcommand,
                 const RunOptions& opts);

}  // namespace oulevy
