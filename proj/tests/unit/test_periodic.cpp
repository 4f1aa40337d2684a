#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "doctest.h"
#include "oulevy/periodic.hpp"

using oulevy::FourierSeries;

TEST_CASE("scalar series evaluates term by term") {
    FourierSeries<double> s;
    s.period = 2.0;
    s.constant = 1.5;
    s.cos_coeffs = {0.5, 0.0};
    s.sin_coeffs = {0.0, -0.25};
    const double w = M_PI;  // 2 pi / period
    for (double t : {0.0, 0.3, 1.7, 2.9}) {
        double want = 1.5 + 0.5 * std::cos(w * t) - 0.25 * std::sin(2.0 * w * t);
        CHECK(s(t) == doctest::Approx(want).epsilon(1e-15));
        CHECK(s(t + 2.0) == doctest::Approx(s(t)).epsilon(1e-13));
    }
    CHECK(s.harmonics() == 2);
    CHECK_FALSE(s.is_constant());
}

TEST_CASE("derivative matches finite differences") {
    FourierSeries<double> s;
    s.period = 1.0;
    s.constant = 0.2;
    s.cos_coeffs = {0.7, -0.1};
    s.sin_coeffs = {0.3, 0.4};
    const double eps = 1e-6;
    for (double t : {0.11, 0.5, 0.93}) {
        double fd = (s(t + eps) - s(t - eps)) / (2.0 * eps);
        CHECK(s.derivative(t) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("constant series") {
    auto s = FourierSeries<double>::constant_series(3.0, 4.5);
    CHECK(s.is_constant());
    CHECK(s(0.0) == 4.5);
    CHECK(s(1.234) == 4.5);
    CHECK(s.derivative(0.7) == 0.0);
}

TEST_CASE("matrix coefficients") {
    FourierSeries<Eigen::MatrixXd> s;
    s.period = 1.0;
    Eigen::MatrixXd c(2, 2), h(2, 2);
    c << 1, 0, 0, 2;
    h << 0, 1, -1, 0;
    s.constant = c;
    s.cos_coeffs = {h};
    s.sin_coeffs = {Eigen::MatrixXd::Zero(2, 2)};
    Eigen::MatrixXd v = s(0.25);  // cos(pi/2) = 0
    CHECK((v - c).norm() < 1e-15);
    Eigen::MatrixXd d = s.derivative(0.25);  // -2 pi sin(pi/2) * h
    CHECK((d + 2.0 * M_PI * h).norm() < 1e-12);
}

TEST_CASE("complex coefficients") {
    FourierSeries<std::complex<double>> s;
    s.period = 1.0;
    s.constant = {1.0, -0.5};
    s.cos_coeffs = {{0.0, 1.0}};
    s.sin_coeffs = {{0.0, 0.0}};
    std::complex<double> v = s(0.5);  // cos(pi) = -1
    CHECK(std::abs(v - std::complex<double>(1.0, -1.5)) < 1e-15);
}
