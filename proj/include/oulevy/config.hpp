#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "oulevy/solution.hpp"

namespace oulevy {

// Malformed or missing fields; the CLI maps this to exit code 2.  Semantic
// rejections (invalid jump measure, unstable A, bad shapes) surface from
// build_scenario as invalid_argument / NotExponentiallyStable and map to 3.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SimulationBlock {
    double s = 0.0;
    double t = 1.0;
    Eigen::VectorXd x0;
    double dt = 0.01;
    long paths = 1000;
};

// Everything a run needs, as read from disk.  Numbers are serialized as
// decimal strings (shortest round-trip form) so that parse -> serialize ->
// parse is the identity byte for byte.
struct ScenarioConfig {
    int dimension = 1;
    double period = 1.0;
    FourierSeries<Eigen::MatrixXd> A;
    FourierSeries<Eigen::VectorXd> f;
    FourierSeries<Eigen::MatrixXd> B;

    Eigen::VectorXd noise_drift;
    Eigen::MatrixXd noise_covariance;
    JumpMeasureSpec jumps;

    ScenarioTols tols;
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";

    // Optional user-supplied tau-independent upper bounds for the decay
    // constants, for models where no estimator exists (atoms, singular R).
    std::optional<double> c1_bound;
    std::optional<double> c2_bound;

    std::optional<SimulationBlock> simulation;
};

ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text);

// Canonical serialization: fixed key order, numbers as decimal strings.
std::string serialize_config(const ScenarioConfig& cfg);

// FNV-1a over the canonical serialization; embedded in every report.
std::uint64_t config_hash(const ScenarioConfig& cfg);

// Shortest decimal string that parses back to exactly v.
std::string format_number(double v);

Scenario build_scenario(const ScenarioConfig& cfg);

}  // namespace oulevy
