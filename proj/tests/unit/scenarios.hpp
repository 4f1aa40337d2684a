#pragma once

// Small reference models shared across the tests.  Closed-form anchors:
//  - scalar_brownian: dX = -X dt + dW, so U(t,s) = e^{-(t-s)}, the slice
//    variance is (1 - e^{-2(t-s)})/2 and the limit variance is 1/2.
//  - periodic_brownian: A(t) = -(1 + 0.5 sin 2 pi t); the period mean of A
//    is -1, so U(1,0) = e^{-1} in this scalar (commuting) case.
//  - atom_jump: pure compound Poisson with a single atom at 2 of rate 1;
//    the mapped limit measure puts mass ln 2 outside the unit ball.
//  - power_law: two-sided density 0.1 |x|^{-3/2} on 0 < |x| <= 1.
//  - planar: d = 2, A = -I + rotation, R = diag(1, 1/4).

#include "oulevy/solution.hpp"

namespace models {

using namespace oulevy;

inline PeriodicCoefficients coeffs_1d(double period, double a_const,
                                      double a_sin = 0.0, double f_const = 0.0) {
    PeriodicCoefficients c;
    c.period = period;
    Eigen::MatrixXd ac(1, 1);
    ac << a_const;
    c.A = FourierSeries<Eigen::MatrixXd>::constant_series(period, ac);
    if (a_sin != 0.0) {
        Eigen::MatrixXd s(1, 1);
        s << a_sin;
        c.A.cos_coeffs = {Eigen::MatrixXd::Zero(1, 1)};
        c.A.sin_coeffs = {s};
    }
    c.f = FourierSeries<Eigen::VectorXd>::constant_series(
        period, Eigen::VectorXd::Constant(1, f_const));
    c.B = FourierSeries<Eigen::MatrixXd>::constant_series(
        period, Eigen::MatrixXd::Identity(1, 1));
    return c;
}

inline LevyTriple brownian_noise(int d = 1) {
    LevyTriple n;
    n.drift = Eigen::VectorXd::Zero(d);
    n.covariance = Eigen::MatrixXd::Identity(d, d);
    return n;
}

inline Scenario scalar_brownian(std::uint64_t seed = 11) {
    return make_scenario(coeffs_1d(1.0, -1.0), brownian_noise(), seed);
}

inline Scenario scalar_brownian_f2(std::uint64_t seed = 21) {
    return make_scenario(coeffs_1d(1.0, -1.0, 0.0, 2.0), brownian_noise(), seed);
}

inline Scenario periodic_brownian(std::uint64_t seed = 12) {
    return make_scenario(coeffs_1d(1.0, -1.0, -0.5), brownian_noise(), seed);
}

inline Scenario atom_jump(std::uint64_t seed = 13, double location = 2.0,
                          double rate = 1.0, double gauss_cov = 0.0) {
    LevyTriple n;
    n.drift = Eigen::VectorXd::Zero(1);
    n.covariance = Eigen::MatrixXd::Constant(1, 1, gauss_cov);
    AtomList list;
    list.atoms.push_back({Eigen::VectorXd::Constant(1, location), rate});
    n.jumps.measure = std::move(list);
    return make_scenario(coeffs_1d(1.0, -1.0), n, seed);
}

inline Scenario power_law(std::uint64_t seed = 14, double c = 0.1,
                          double alpha = 0.5, double r_max = 1.0,
                          double gauss_cov = 1.0) {
    LevyTriple n;
    n.drift = Eigen::VectorXd::Zero(1);
    n.covariance = Eigen::MatrixXd::Constant(1, 1, gauss_cov);
    n.jumps.measure = PowerLawDensity{c, alpha, r_max};
    return make_scenario(coeffs_1d(1.0, -1.0), n, seed);
}

inline Scenario zero_noise_f2(std::uint64_t seed = 31) {
    LevyTriple n;
    n.drift = Eigen::VectorXd::Zero(1);
    n.covariance = Eigen::MatrixXd::Zero(1, 1);
    return make_scenario(coeffs_1d(1.0, -1.0, 0.0, 2.0), n, seed);
}

inline Scenario planar(std::uint64_t seed = 15, bool periodic_part = true) {
    PeriodicCoefficients c;
    c.period = 1.0;
    Eigen::MatrixXd a(2, 2);
    a << -1.0, 1.0, -1.0, -1.0;
    c.A = FourierSeries<Eigen::MatrixXd>::constant_series(1.0, a);
    if (periodic_part) {
        Eigen::MatrixXd h(2, 2);
        h << 0.4, 0.0, 0.0, -0.2;
        c.A.cos_coeffs = {h};
        c.A.sin_coeffs = {Eigen::MatrixXd::Zero(2, 2)};
    }
    c.f = FourierSeries<Eigen::VectorXd>::constant_series(1.0,
                                                          Eigen::VectorXd::Zero(2));
    c.B = FourierSeries<Eigen::MatrixXd>::constant_series(
        1.0, Eigen::MatrixXd::Identity(2, 2));
    LevyTriple n;
    n.drift = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd r(2, 2);
    r << 1.0, 0.0, 0.0, 0.25;
    n.covariance = r;
    return make_scenario(c, n, seed);
}

}  // namespace models
