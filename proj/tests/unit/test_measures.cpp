#include <cmath>
#include <complex>
#include <variant>

#include "doctest.h"
#include "oulevy/measures.hpp"
#include "scenarios.hpp"

using namespace oulevy;

namespace {
Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }
}  // namespace

TEST_CASE("limit law of the scalar gaussian flow is N(0, 1/2)") {
    Scenario sc = models::scalar_brownian();
    IDLaw law = limit_law(sc, 0.0);
    CHECK(std::isinf(law.window_start));
    CHECK(std::abs(law.mean(0)) < 1e-9);
    CHECK(law.covariance(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(std::holds_alternative<std::monostate>(law.jumps));

    // window version for comparison
    IDLaw win = window_law(sc, 0.0, 1.0);
    CHECK(win.covariance(0, 0) ==
          doctest::Approx(0.5 * (1.0 - std::exp(-2.0))).epsilon(1e-9));
}

TEST_CASE("constant forcing shifts the limit mean") {
    Scenario sc = models::scalar_brownian_f2();
    IDLaw law = limit_law(sc, 0.4);
    CHECK(law.mean(0) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("mapped jump functionals for a single atom") {
    // Atom at 2, unit rate, A = -1: mapped jumps y = 2 e^{-age}.
    // mass above 1: age < ln 2, so ln 2.
    // int min(1,y^2): ln 2 + int_{ln2}^inf 4 e^{-2a} da = ln 2 + 1/2.
    // shift (truncation convention): int_{ln2}^inf 2 e^{-a} da = 1.
    Scenario sc = models::atom_jump();
    IDLaw law = limit_law(sc, 0.0);
    CHECK(law.jump_mass_above_unit == doctest::Approx(std::log(2.0)).epsilon(1e-8));
    CHECK(law.jump_small_square ==
          doctest::Approx(std::log(2.0) + 0.5).epsilon(1e-8));
    CHECK(law.mean(0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(law.truncation_periods > 0);
    CHECK(law.tail_bound < 1e-8);

    REQUIRE(std::holds_alternative<JumpAtomCloud>(law.jumps));
    const JumpAtomCloud& cloud = std::get<JumpAtomCloud>(law.jumps);
    REQUIRE(!cloud.atoms.empty());
    double mass = 0.0, small_sq = 0.0;
    for (const Atom& a : cloud.atoms) {
        CHECK(a.intensity > 0.0);
        CHECK(a.location(0) > 0.0);
        CHECK(a.location(0) <= 2.0 + 1e-12);
        if (a.location.norm() > 1.0) mass += a.intensity;
        small_sq += a.intensity * std::min(1.0, a.location.squaredNorm());
    }
    // the discretized cloud reproduces the exact functionals approximately
    CHECK(mass == doctest::Approx(std::log(2.0)).epsilon(0.05));
    CHECK(small_sq == doctest::Approx(std::log(2.0) + 0.5).epsilon(0.05));
}

TEST_CASE("power law slices carry the base density") {
    Scenario sc = models::power_law();
    IDLaw law = limit_law(sc, 0.0);
    REQUIRE(std::holds_alternative<JumpDensitySlices>(law.jumps));
    const JumpDensitySlices& sl = std::get<JumpDensitySlices>(law.jumps);
    CHECK(sl.base.c == doctest::Approx(0.1));
    CHECK(sl.base.alpha == doctest::Approx(0.5));
    REQUIRE(!sl.scale_weight.empty());
    for (auto [u, w] : sl.scale_weight) {
        CHECK(u > 0.0);
        CHECK(u <= 1.0 + 1e-12);
        CHECK(w > 0.0);
    }
}

TEST_CASE("slice characteristic function closed form") {
    Scenario sc = models::scalar_brownian();
    // log nu_t^(1) = -int_0^inf e^{-2a}/2 da = -1/4, any t.
    for (double t : {0.0, 0.3, 2.7}) {
        std::complex<double> v = esm_char_fn(sc, t, v1(1.0));
        CHECK(std::abs(v - std::exp(std::complex<double>(-0.25, 0.0))) < 1e-9);
    }
}

TEST_CASE("exponent assembled from the law matches the continuous log") {
    for (Scenario sc : {models::atom_jump(), models::power_law(),
                        models::periodic_brownian()}) {
        IDLaw law = limit_law(sc, 0.6);
        for (double h : {0.5, 1.0, 1.7}) {
            std::complex<double> a = law_char_exponent(sc, law, v1(h));
            std::complex<double> b = continuous_log_esm(sc, 0.6, v1(h));
            CHECK(std::abs(a - b) < 1e-6);
        }
    }
}

TEST_CASE("period map leaves the slices invariant") {
    Scenario sc = models::periodic_brownian();
    for (double t : {0.15, 0.8}) {
        std::complex<double> a = esm_char_fn(sc, t, v1(1.2));
        std::complex<double> b = esm_char_fn(sc, t + sc.period(), v1(1.2));
        CHECK(std::abs(a - b) < 1e-10);
    }

    std::vector<Eigen::VectorXd> probes{v1(0.5), v1(1.0), v1(-1.4)};
    InvarianceReport rep = check_invariance(sc, 0.3, 1.7, probes);
    CHECK(rep.defects.size() == probes.size());
    CHECK(rep.max_defect < 1e-8);
}

TEST_CASE("backward fixed point iteration reproduces the slice") {
    Scenario sc = models::periodic_brownian();
    for (double h : {0.7, 1.3}) {
        std::complex<double> fixed = uniqueness_iteration(sc, 0.4, v1(h));
        std::complex<double> direct = esm_char_fn(sc, 0.4, v1(h));
        CHECK(std::abs(fixed - direct) < 1e-8);
    }
    // explicit iteration count high enough to converge
    std::complex<double> manual = uniqueness_iteration(sc, 0.4, v1(0.7), 60);
    CHECK(std::abs(manual - esm_char_fn(sc, 0.4, v1(0.7))) < 1e-8);
}

TEST_CASE("log gradient of the slice characteristic function") {
    Scenario sc = models::scalar_brownian_f2();
    EsmCharGrad g0 = esm_char_grad(sc, 0.0, v1(0.0));
    CHECK(std::abs(g0.value - 1.0) < 1e-12);
    // at h = 0 the log gradient is i * mean
    CHECK(std::abs(g0.grad_log(0) - std::complex<double>(0.0, 2.0)) < 1e-8);

    // against a central difference of the continuous log at h = 0.9
    EsmCharGrad g = esm_char_grad(sc, 0.0, v1(0.9));
    CHECK(std::abs(g.value - esm_char_fn(sc, 0.0, v1(0.9))) < 1e-12);
    double eps = 1e-5;
    std::complex<double> fd = (continuous_log_esm(sc, 0.0, v1(0.9 + eps)) -
                               continuous_log_esm(sc, 0.0, v1(0.9 - eps))) /
                              (2.0 * eps);
    CHECK(std::abs(g.grad_log(0) - fd) < 1e-7);
}

TEST_CASE("kolmogorov-smirnov helpers") {
    double d = ks_statistic({0.8, 0.2, 0.6, 0.4},
                            [](double x) { return std::min(1.0, std::max(0.0, x)); });
    CHECK(d == doctest::Approx(0.2).epsilon(1e-12));

    CHECK(ks_critical(0.01, 10000) == doctest::Approx(0.0162762).epsilon(1e-4));
    CHECK(ks_critical(0.05, 100) ==
          doctest::Approx(std::sqrt(-0.5 * std::log(0.025)) / 10.0).epsilon(1e-12));

    CHECK(normal_cdf(0.0, 0.0, 1.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.96, 0.0, 1.0) == doctest::Approx(0.9750021).epsilon(1e-5));
    CHECK(normal_cdf(-1.0, 2.0, 4.0) == doctest::Approx(0.0668072).epsilon(1e-5));
}

TEST_CASE("samples from the slice pass a KS test against the closed form") {
    Scenario sc = models::scalar_brownian(909);
    const int n = 3000;
    std::vector<Eigen::VectorXd> xs = sample_nu(sc, 0.0, n, 0.01);
    REQUIRE(static_cast<int>(xs.size()) == n);
    std::vector<double> flat(n);
    for (int i = 0; i < n; ++i) flat[i] = xs[i](0);
    double d = ks_statistic(flat, [](double x) { return normal_cdf(x, 0.0, 0.5); });
    CHECK(d < ks_critical(0.01, n));
}
