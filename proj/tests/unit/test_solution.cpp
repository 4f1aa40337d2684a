#include <cmath>
#include <complex>

#include "doctest.h"
#include "oulevy/solution.hpp"
#include "scenarios.hpp"

using namespace oulevy;

namespace {
Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }
}  // namespace

TEST_CASE("characteristic function of the scalar gaussian flow") {
    Scenario sc = models::scalar_brownian();
    // X(1,0,x) ~ N(x e^{-1}, (1-e^{-2})/2)
    const double var = 0.5 * (1.0 - std::exp(-2.0));
    for (double h : {0.25, 1.0, 2.0}) {
        std::complex<double> got = char_fn(sc, 0.0, 1.0, v1(1.0), v1(h));
        std::complex<double> want =
            std::exp(std::complex<double>(-0.5 * var * h * h,
                                          h * std::exp(-1.0)));
        CHECK(std::abs(got - want) < 1e-10);
    }
    // zero-width window
    std::complex<double> id = char_fn(sc, 0.5, 0.5, v1(0.7), v1(1.0));
    CHECK(std::abs(id - std::polar(1.0, 0.7)) < 1e-14);
}

TEST_CASE("windows from minus infinity") {
    Scenario sc = models::scalar_brownian();
    CHECK(covariance_window(sc, 0.0, 1.0)(0, 0) ==
          doctest::Approx(0.5 * (1.0 - std::exp(-2.0))).epsilon(1e-10));
    CHECK(covariance_window(sc, neg_infinity(), 0.0)(0, 0) ==
          doctest::Approx(0.5).epsilon(1e-8));

    Scenario f2 = models::scalar_brownian_f2();
    CHECK(drift_convolution(f2, neg_infinity(), 0.3)(0) ==
          doctest::Approx(2.0).epsilon(1e-8));
    CHECK(drift_convolution(f2, 0.0, 1.0)(0) ==
          doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-10));
}

TEST_CASE("tail truncation grows slowly with tighter tolerance") {
    Scenario sc = models::scalar_brownian();
    long long p9 = tail_periods(sc, 1.0, 1.0, 1e-9);
    long long p12 = tail_periods(sc, 1.0, 1.0, 1e-12);
    CHECK(p9 >= 5);
    CHECK(p12 > p9);
    CHECK(p12 < 100);
}

TEST_CASE("deterministic drift path is exact") {
    Scenario sc = models::zero_noise_f2();
    PathEnsemble ens = simulate_paths(sc, 0.0, 1.0, v1(0.0), 0.125, 3);
    // dX = (-X + 2) dt from 0: X(1) = 2 (1 - e^{-1}); the propagator scheme
    // integrates the drift convolution exactly regardless of dt.
    double want = 2.0 * (1.0 - std::exp(-1.0));
    for (const Eigen::VectorXd& x : ens.terminal)
        CHECK(x(0) == doctest::Approx(want).epsilon(1e-9));
    CHECK(ens.grid.size() == 9);
    CHECK(ens.grid.back() == 1.0);
}

TEST_CASE("oversized steps are rejected") {
    Scenario sc = models::scalar_brownian();
    CHECK_THROWS_AS(simulate_paths(sc, 0.0, 1.0, v1(0.0), 0.3, 2),
                    std::invalid_argument);
}

TEST_CASE("worker count never changes the draw") {
    Scenario sc = models::scalar_brownian(77);
    SimulateOptions one, five;
    one.workers = 1;
    five.workers = 5;
    PathEnsemble a = simulate_paths(sc, 0.0, 1.0, v1(0.2), 0.02, 64, one);
    PathEnsemble b = simulate_paths(sc, 0.0, 1.0, v1(0.2), 0.02, 64, five);
    REQUIRE(a.terminal.size() == b.terminal.size());
    for (std::size_t i = 0; i < a.terminal.size(); ++i)
        CHECK((a.terminal[i] - b.terminal[i]).norm() == 0.0);
}

TEST_CASE("stored paths and streamed weak pairing agree") {
    Scenario sc = models::atom_jump(5, 2.0, 1.0, 0.5);
    Eigen::VectorXd y = v1(0.8);

    SimulateOptions stored;
    stored.store_paths = true;
    PathEnsemble a = simulate_paths(sc, 0.0, 2.0, v1(0.1), 0.01, 40, stored);
    WeakResidualReport ra = weak_residual(sc, a, y);

    SimulateOptions streamed;
    streamed.weak_y = y;
    PathEnsemble b = simulate_paths(sc, 0.0, 2.0, v1(0.1), 0.01, 40, streamed);
    WeakResidualReport rb = weak_residual(sc, b, y);

    REQUIRE(ra.residuals.size() == rb.residuals.size());
    for (std::size_t i = 0; i < ra.residuals.size(); ++i)
        CHECK(std::abs(ra.residuals[i] - rb.residuals[i]) < 1e-11);
}

TEST_CASE("ensemble statistics agree with closed forms at MC accuracy") {
    Scenario sc = models::scalar_brownian(101);
    const int n = 20000;
    PathEnsemble ens = simulate_paths(sc, 0.0, 1.0, v1(0.0), 0.005, n);

    Eigen::VectorXd mean = ensemble_mean(ens.terminal);
    Eigen::MatrixXd cov = ensemble_covariance(ens.terminal);
    const double var = 0.5 * (1.0 - std::exp(-2.0));
    CHECK(std::abs(mean(0)) < 3.5 * std::sqrt(var / n));
    CHECK(cov(0, 0) == doctest::Approx(var).epsilon(0.05));

    EmpiricalChar emp = empirical_char(ens.terminal, v1(1.0));
    std::complex<double> closed = char_fn(sc, 0.0, 1.0, v1(0.0), v1(1.0));
    CHECK(std::abs(emp.value - closed) <
          3.5 * std::hypot(emp.se_real, emp.se_imag) + 2e-3);
}

TEST_CASE("residual statistics") {
    WeakResidualReport r = residual_stats({1.0, -1.0, 3.0, -3.0});
    CHECK(r.n == 4);
    CHECK(r.mean == doctest::Approx(0.0));
    // sample variance 20/3, se = sqrt(var/n)
    CHECK(r.se == doctest::Approx(std::sqrt(20.0 / 3.0 / 4.0)).epsilon(1e-12));
}
