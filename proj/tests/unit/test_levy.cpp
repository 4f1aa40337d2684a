#include <cmath>
#include <complex>

#include "doctest.h"
#include "oulevy/levy.hpp"

using namespace oulevy;

namespace {
Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }
}  // namespace

TEST_CASE("measure validation accepts and rejects") {
    JumpMeasureSpec pl;
    pl.measure = PowerLawDensity{0.1, 0.5, 2.5};
    MeasureValidation ok = validate_measure(pl, 1);
    REQUIRE(ok.accepted);
    // 2c [ int_0^1 x^{1-alpha} + int_1^2.5 x^{-1-alpha} ], frozen from an
    // independent high-precision evaluation.
    CHECK(ok.small_square_integral ==
          doctest::Approx(0.28035112051986299).epsilon(1e-12));

    pl.measure = PowerLawDensity{0.1, 2.0, 1.0};
    MeasureValidation diverging = validate_measure(pl, 1);
    CHECK_FALSE(diverging.accepted);
    CHECK(diverging.message.find("diverges") != std::string::npos);

    pl.measure = PowerLawDensity{0.1, 0.5, 1.0};
    CHECK_FALSE(validate_measure(pl, 2).accepted);  // density is 1-d only

    JumpMeasureSpec atoms;
    AtomList list;
    list.atoms.push_back({v1(2.0), -1.0});
    atoms.measure = list;
    CHECK_FALSE(validate_measure(atoms, 1).accepted);

    list.atoms[0].intensity = 1.0;
    atoms.measure = list;
    MeasureValidation av = validate_measure(atoms, 1);
    REQUIRE(av.accepted);
    CHECK(av.small_square_integral == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(av.large_first_moment == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("triple validation symmetrizes and screens") {
    LevyTriple t;
    t.drift = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd r(2, 2);
    r << 1.0, 0.3, 0.3, 2.0;
    t.covariance = r;
    LevyTriple v = validated_triple(t);
    CHECK((v.covariance - r).norm() < 1e-12);

    r(0, 1) = 0.9;  // asymmetric now
    t.covariance = r;
    CHECK_THROWS_AS(validated_triple(t), std::invalid_argument);

    r << 1.0, 2.0, 2.0, 1.0;  // eigenvalues -1, 3
    t.covariance = r;
    CHECK_THROWS_AS(validated_triple(t), std::invalid_argument);

    t.drift = Eigen::VectorXd::Zero(5);
    t.covariance = Eigen::MatrixXd::Identity(5, 5);
    CHECK_THROWS_AS(validated_triple(t), std::invalid_argument);
}

TEST_CASE("psd square root") {
    Eigen::MatrixXd r(2, 2);
    r << 4.0, 0.0, 0.0, 1.0;
    Eigen::MatrixXd s = matrix_sqrt_psd(r);
    CHECK((s * s - r).norm() < 1e-12);
}

TEST_CASE("gaussian symbol is exact") {
    LevyTriple t;
    t.drift = v1(0.3);
    t.covariance = Eigen::MatrixXd::Constant(1, 1, 2.0);
    for (double u : {-1.5, 0.4, 2.0}) {
        std::complex<double> got = levy_symbol(t, v1(u));
        std::complex<double> want(-u * u, 0.3 * u);
        CHECK(std::abs(got - want) < 1e-13);
    }
}

TEST_CASE("atom symbol matches the direct sum") {
    LevyTriple t;
    t.drift = v1(0.0);
    t.covariance = Eigen::MatrixXd::Zero(1, 1);
    AtomList list;
    list.atoms.push_back({v1(2.0), 0.7});
    list.atoms.push_back({v1(-0.5), 1.3});  // inside the unit ball: compensated
    t.jumps.measure = list;
    for (double u : {-1.1, 0.6}) {
        std::complex<double> want =
            0.7 * (std::polar(1.0, 2.0 * u) - 1.0) +
            1.3 * (std::polar(1.0, -0.5 * u) - 1.0 -
                   std::complex<double>(0.0, -0.5 * u));
        CHECK(std::abs(levy_symbol(t, v1(u)) - want) < 1e-13);
    }
}

TEST_CASE("power-law symbol against frozen oracles") {
    // Independent high-precision values of
    //   2c int_0^rmax (cos(ux)-1) x^{-3/2} dx,  c = 0.1.
    PowerLawDensity in{0.1, 0.5, 1.0};
    CHECK(power_law_symbol(in, 0.7, 1e-12) ==
          doctest::Approx(-0.032100903905073908).epsilon(1e-10));
    CHECK(power_law_symbol(in, 1.3, 1e-12) ==
          doctest::Approx(-0.10610489089922573).epsilon(1e-10));
    CHECK(power_law_symbol(in, 2.0, 1e-12) ==
          doctest::Approx(-0.23164023444148008).epsilon(1e-10));
    CHECK(power_law_symbol(in, -1.3, 1e-12) ==
          doctest::Approx(power_law_symbol(in, 1.3, 1e-12)).epsilon(1e-12));

    PowerLawDensity wide{0.1, 0.5, 2.5};
    CHECK(power_law_symbol(wide, 1.3, 1e-12) ==
          doctest::Approx(-0.31023909081276489).epsilon(1e-10));

    CHECK(power_law_symbol_grad(in, 1.3, 1e-12) ==
          doctest::Approx(-0.15350206132668876).epsilon(1e-10));

    // pair symbol equals the symbol difference J(a+b) - J(a) - J(b)
    double direct = power_law_pair_symbol(in, 0.9, -0.4, 1e-12);
    CHECK(direct == doctest::Approx(0.046551691924664).epsilon(1e-9));

    // full triple plumbing reproduces the same numbers
    LevyTriple t;
    t.drift = v1(0.0);
    t.covariance = Eigen::MatrixXd::Zero(1, 1);
    t.jumps.measure = in;
    CHECK(std::abs(levy_symbol(t, v1(1.3)) -
                   std::complex<double>(-0.10610489089922573, 0.0)) < 1e-9);
    CHECK(std::abs(jump_pair_symbol(t, v1(0.9), v1(-0.4)) -
                   std::complex<double>(0.046551691924664, 0.0)) < 1e-9);
}

TEST_CASE("symbol gradient agrees with finite differences") {
    LevyTriple t;
    t.drift = v1(0.2);
    t.covariance = Eigen::MatrixXd::Constant(1, 1, 0.8);
    AtomList list;
    list.atoms.push_back({v1(1.4), 0.6});
    t.jumps.measure = list;
    const double eps = 1e-6;
    for (double u : {-0.9, 0.5, 1.7}) {
        std::complex<double> fd =
            (levy_symbol(t, v1(u + eps)) - levy_symbol(t, v1(u - eps))) /
            (2.0 * eps);
        CHECK(std::abs(levy_symbol_gradient(t, v1(u))(0) - fd) < 1e-7);
    }
}

TEST_CASE("atom pair symbol is the direct product sum") {
    LevyTriple t;
    t.drift = v1(0.0);
    t.covariance = Eigen::MatrixXd::Zero(1, 1);
    AtomList list;
    list.atoms.push_back({v1(2.0), 1.0});
    t.jumps.measure = list;
    double a = 0.8, b = -0.3;
    std::complex<double> want = (std::polar(1.0, 2.0 * a) - 1.0) *
                                (std::polar(1.0, 2.0 * b) - 1.0);
    CHECK(std::abs(jump_pair_symbol(t, v1(a), v1(b)) - want) < 1e-13);
}

TEST_CASE("increment sampling is reproducible and has sane moments") {
    LevyTriple t;
    t.drift = v1(0.1);
    t.covariance = Eigen::MatrixXd::Identity(1, 1);
    AtomList list;
    list.atoms.push_back({v1(1.5), 0.8});
    t.jumps.measure = list;
    PreparedNoise p = prepare_noise(t);
    CHECK(p.dropped_variance == 0.0);  // atoms drop nothing

    Pcg64 a(5, 77), b(5, 77);
    for (int i = 0; i < 32; ++i) {
        Eigen::VectorXd xa = sample_increment_prepared(p, 0.05, a);
        Eigen::VectorXd xb = sample_increment_prepared(p, 0.05, b);
        CHECK((xa - xb).norm() == 0.0);
    }

    // moment smoke test: E dL = (b + int_{|x|>1} x M) dt, Var = (R + int x^2 M) dt
    const double dt = 0.05;
    const int n = 60000;
    Pcg64 g(17, 3);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = sample_increment_prepared(p, dt, g)(0);
        sum += x;
        sq += x * x;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    double want_mean = (0.1 + 0.8 * 1.5) * dt;
    double want_var = (1.0 + 0.8 * 1.5 * 1.5) * dt;
    CHECK(mean == doctest::Approx(want_mean).epsilon(0.12));
    CHECK(var == doctest::Approx(want_var).epsilon(0.05));
}

TEST_CASE("power-law sampler records the dropped variance") {
    LevyTriple t;
    t.drift = v1(0.0);
    t.covariance = Eigen::MatrixXd::Zero(1, 1);
    t.jumps.measure = PowerLawDensity{0.1, 0.5, 1.0};
    PreparedNoise p = prepare_noise(t);
    // int_{|x|<cut} x^2 m(x) dx = 2c cut^{2-alpha}/(2-alpha), cut = 1e-4
    double want = 2.0 * 0.1 * std::pow(1e-4, 1.5) / 1.5;
    CHECK(p.dropped_variance == doctest::Approx(want).epsilon(1e-10));
    CHECK(p.dropped_variance < 1e-6);
}
