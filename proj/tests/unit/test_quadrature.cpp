#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "doctest.h"
#include "oulevy/quadrature.hpp"

using namespace oulevy::quad;

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
    Rule r7 = gauss_legendre(7);
    REQUIRE(r7.nodes.size() == 7);
    double wsum = 0.0;
    for (double w : r7.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));

    // degree 13 = 2*7 - 1 is still exact
    double acc = 0.0;
    for (std::size_t i = 0; i < 7; ++i)
        acc += r7.weights[i] * std::pow(r7.nodes[i], 12);
    CHECK(acc == doctest::Approx(2.0 / 13.0).epsilon(1e-13));

    // nodes are symmetric about 0
    Rule r64 = gauss_legendre(64);
    for (int i = 0; i < 32; ++i)
        CHECK(r64.nodes[i] == doctest::Approx(-r64.nodes[63 - i]).epsilon(1e-13));
}

TEST_CASE("gauss-hermite moments") {
    Rule h = gauss_hermite(64);
    double m0 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < h.nodes.size(); ++i) {
        m0 += h.weights[i];
        m2 += h.weights[i] * h.nodes[i] * h.nodes[i];
    }
    const double sqrt_pi = std::sqrt(M_PI);
    CHECK(m0 == doctest::Approx(sqrt_pi).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(0.5 * sqrt_pi).epsilon(1e-12));
}

TEST_CASE("fixed rule on a shifted interval") {
    double v = fixed_rule([](double x) { return std::exp(x); }, 0.0, 2.0,
                          legendre15());
    CHECK(v == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature hits closed forms") {
    CHECK(adaptive([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-12));

    // steep but integrable
    double v = adaptive([](double x) { return 1.0 / std::sqrt(x + 0.01); }, 0.0,
                        1.0, 1e-11);
    CHECK(v == doctest::Approx(2.0 * (std::sqrt(1.01) - 0.1)).epsilon(1e-10));

    // degenerate interval integrates to zero
    CHECK(adaptive([](double x) { return std::exp(x); }, 1.0, 1.0, 1e-12) ==
          0.0);
}

TEST_CASE("adaptive quadrature over complex and vector values") {
    std::complex<double> z = adaptive(
        [](double x) { return std::polar(1.0, x); }, 0.0, 1.0, 1e-12);
    std::complex<double> want =
        (std::polar(1.0, 1.0) - 1.0) / std::complex<double>(0.0, 1.0);
    CHECK(std::abs(z - want) < 1e-12);

    Eigen::VectorXd v = adaptive(
        [](double x) {
            Eigen::VectorXd out(2);
            out << x, x * x;
            return out;
        },
        0.0, 1.0, 1e-12);
    CHECK(v(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("split points recover accuracy at a kink") {
    auto f = [](double x) { return std::abs(x - 0.3); };
    double v = adaptive_split(f, 0.0, 1.0, {0.3}, 1e-13);
    // int |x - 0.3| over [0,1] = 0.3^2/2 + 0.7^2/2
    CHECK(v == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-13));
}

TEST_CASE("crossing scan finds all simple roots") {
    auto g = [](double x) { return std::sin(x); };
    auto roots = find_crossings(g, 0.5, 10.0);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(M_PI).epsilon(1e-9));
    CHECK(roots[1] == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
    CHECK(roots[2] == doctest::Approx(3.0 * M_PI).epsilon(1e-9));
}

TEST_CASE("exhausted evaluation budget throws") {
    CHECK_THROWS_AS(adaptive([](double x) { return std::sin(500.0 * x); }, 0.0,
                             3.0, 1e-13, 300),
                    std::runtime_error);
}
