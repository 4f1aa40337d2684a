#include <charconv>
#include <cmath>

#include "doctest.h"
#include "oulevy/config.hpp"

using namespace oulevy;

namespace {

const char* kMinimal = R"json({
  "dimension": 1,
  "period": 1,
  "coefficients": {
    "A": {"constant": [[-1]]},
    "f": {"constant": [0]},
    "B": {"constant": [[1]]}
  },
  "noise": {"drift": [0], "covariance": [[1]]},
  "master_seed": 42
})json";

ScenarioConfig base_config() {
    ScenarioConfig cfg;
    cfg.dimension = 1;
    cfg.period = 1.0;
    cfg.A = FourierSeries<Eigen::MatrixXd>::constant_series(
        1.0, Eigen::MatrixXd::Constant(1, 1, -1.0));
    cfg.f = FourierSeries<Eigen::VectorXd>::constant_series(1.0,
                                                            Eigen::VectorXd::Zero(1));
    cfg.B = FourierSeries<Eigen::MatrixXd>::constant_series(
        1.0, Eigen::MatrixXd::Identity(1, 1));
    cfg.noise_drift = Eigen::VectorXd::Zero(1);
    cfg.noise_covariance = Eigen::MatrixXd::Identity(1, 1);
    cfg.master_seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("parse, serialize, parse is the identity") {
    ScenarioConfig a = parse_config_text(kMinimal);
    CHECK(a.dimension == 1);
    CHECK(a.master_seed == 42);
    CHECK(a.A.constant(0, 0) == -1.0);
    CHECK(a.output_dir == "out");

    std::string s1 = serialize_config(a);
    ScenarioConfig b = parse_config_text(s1);
    std::string s2 = serialize_config(b);
    CHECK(s1 == s2);
    CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("numbers may arrive as decimal strings") {
    std::string quoted = kMinimal;
    quoted.replace(quoted.find("\"period\": 1"), 11, "\"period\": \"1\"");
    ScenarioConfig a = parse_config_text(kMinimal);
    ScenarioConfig b = parse_config_text(quoted);
    CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("missing and malformed fields") {
    std::string no_period = kMinimal;
    no_period.replace(no_period.find("\"period\": 1,"), 12, "");
    CHECK_THROWS_WITH_AS(parse_config_text(no_period),
                         doctest::Contains("period"), ConfigError);

    std::string bad_num = kMinimal;
    bad_num.replace(bad_num.find("\"period\": 1"), 11, "\"period\": \"one\"");
    CHECK_THROWS_AS(parse_config_text(bad_num), ConfigError);

    CHECK_THROWS_AS(parse_config_text("not json at all"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[1,2,3]"), ConfigError);
    CHECK_THROWS_AS(parse_config("/nonexistent/path.json"), ConfigError);

    // wrong shape: 2x2 A against dimension 1
    std::string wide = kMinimal;
    wide.replace(wide.find("[[-1]]"), 6, "[[-1, 0], [0, -1]]");
    CHECK_THROWS_AS(parse_config_text(wide), ConfigError);
}

TEST_CASE("jump block variants") {
    std::string atoms = kMinimal;
    atoms.replace(atoms.find("\"noise\": {\"drift\": [0], \"covariance\": [[1]]}"),
                  44,
                  "\"noise\": {\"drift\": [0], \"covariance\": [[1]], \"jumps\": "
                  "{\"type\": \"atoms\", \"atoms\": [{\"location\": [2], "
                  "\"intensity\": 1}], \"quadrature_nodes\": 48}}");
    ScenarioConfig a = parse_config_text(atoms);
    REQUIRE(a.jumps.atoms() != nullptr);
    CHECK(a.jumps.atoms()->atoms.at(0).location(0) == 2.0);
    CHECK(a.jumps.quadrature_nodes == 48);
    std::string round = serialize_config(a);
    CHECK(serialize_config(parse_config_text(round)) == round);

    std::string unknown = atoms;
    unknown.replace(unknown.find("\"atoms\", "), 9, "\"smooth\", ");
    CHECK_THROWS_WITH_AS(parse_config_text(unknown),
                         doctest::Contains("unknown jump type"), ConfigError);
}

TEST_CASE("tolerance and simulation blocks") {
    std::string text = kMinimal;
    text.insert(text.rfind('}'),
                ",\n  \"tolerances\": {\"quad_tol\": 1e-9},\n"
                "  \"simulation\": {\"s\": 0, \"t\": 2, \"x0\": [0.5], "
                "\"dt\": 0.01, \"paths\": 500}\n");
    ScenarioConfig cfg = parse_config_text(text);
    CHECK(cfg.tols.quad_tol == 1e-9);
    CHECK(cfg.tols.ode_tol == 1e-12);  // untouched default
    REQUIRE(cfg.simulation.has_value());
    CHECK(cfg.simulation->t == 2.0);
    CHECK(cfg.simulation->paths == 500);

    std::string neg = text;
    neg.replace(neg.find("1e-9"), 4, "-1e-9");
    CHECK_THROWS_AS(parse_config_text(neg), ConfigError);

    std::string zero_paths = text;
    zero_paths.replace(zero_paths.find("\"paths\": 500"), 12, "\"paths\": 0");
    CHECK_THROWS_AS(parse_config_text(zero_paths), ConfigError);
}

TEST_CASE("shortest round trip number formatting") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-8, 0.25, 1.0, 12345678901234567.0,
                     2.2250738585072014e-308}) {
        std::string s = format_number(v);
        double back = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(ec == std::errc{});
        REQUIRE(p == s.data() + s.size());
        CHECK(back == v);
    }
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.25) == "0.25");
}

TEST_CASE("hash tracks content") {
    ScenarioConfig a = base_config();
    ScenarioConfig b = base_config();
    b.master_seed = 43;
    CHECK(config_hash(a) != config_hash(b));
    ScenarioConfig c = base_config();
    c.period = 2.0;
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("semantic rejections surface from scenario construction") {
    // alpha = 2 makes the small-jump integral diverge
    ScenarioConfig heavy = base_config();
    PowerLawDensity pl;
    pl.c = 0.1;
    pl.alpha = 2.0;
    pl.r_max = 1.0;
    heavy.jumps.measure = pl;
    CHECK_THROWS_AS(build_scenario(heavy), std::invalid_argument);

    ScenarioConfig unstable = base_config();
    unstable.A = FourierSeries<Eigen::MatrixXd>::constant_series(
        1.0, Eigen::MatrixXd::Constant(1, 1, 0.1));
    CHECK_THROWS_AS(build_scenario(unstable), NotExponentiallyStable);

    ScenarioConfig mismatch = base_config();
    mismatch.dimension = 2;
    CHECK_THROWS_AS(build_scenario(mismatch), std::invalid_argument);

    // the happy path builds
    Scenario sc = build_scenario(base_config());
    CHECK(sc.dim() == 1);
    CHECK(sc.period() == 1.0);
}
