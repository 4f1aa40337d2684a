#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "oulevy/rng.hpp"

namespace oulevy {

// Jump measure given by finitely many atoms: mass `intensity` at `location`.
struct Atom {
    Eigen::VectorXd location;
    double intensity = 0.0;
};
struct AtomList {
    std::vector<Atom> atoms;
};

// Scalar two-sided density m(x) = c |x|^{-1-alpha} on 0 < |x| <= r_max,
// alpha in (0,2).  Supported in dimension 1 only.
struct PowerLawDensity {
    double c = 0.0;
    double alpha = 0.5;
    double r_max = 1.0;
};

struct JumpMeasureSpec {
    std::variant<std::monostate, AtomList, PowerLawDensity> measure;
    int quadrature_nodes = 64;  // per-period node count for discretized clouds

    bool empty() const { return std::holds_alternative<std::monostate>(measure); }
    const AtomList* atoms() const { return std::get_if<AtomList>(&measure); }
    const PowerLawDensity* power_law() const {
        return std::get_if<PowerLawDensity>(&measure);
    }
};

struct MeasureValidation {
    bool accepted = false;
    double small_square_integral = 0.0;  // integral of min(1, |x|^2)
    double large_first_moment = 0.0;     // integral of |x| over |x| > 1
    std::string message;
};

// Characteristics [drift, covariance, jumps] of the driving noise, with the
// truncation function chi_{|x| <= 1} fixed throughout.
struct LevyTriple {
    Eigen::VectorXd drift;
    Eigen::MatrixXd covariance;
    JumpMeasureSpec jumps;

    int dim() const { return static_cast<int>(drift.size()); }
};

MeasureValidation validate_measure(const JumpMeasureSpec& spec, int dim);

// Symmetrizes the covariance (rejecting asymmetry beyond 1e-12 relative),
// clamps eigenvalues below -1e-12 as errors and negatives to zero, and
// requires an accepted jump measure.  Throws std::invalid_argument.
LevyTriple validated_triple(LevyTriple t);

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m);

// Integrals of the scalar power-law density (all tolerances absolute):
//   symbol      J(v)  = 2c int_0^rmax (cos(vx)-1) x^{-1-alpha} dx
//   derivative  J'(v) = -2c int_0^rmax sin(vx) x^{-alpha} dx
//   pair        P(a,b)= int (e^{iay}-1)(e^{iby}-1) m(y) dy
//                     = 2c int_0^rmax [cos((a+b)x)-cos(ax)-cos(bx)+1] x^{-1-alpha} dx
double power_law_symbol(const PowerLawDensity& d, double v, double tol);
double power_law_symbol_grad(const PowerLawDensity& d, double v, double tol);
double power_law_pair_symbol(const PowerLawDensity& d, double a, double b, double tol);

// Levy symbol  lambda(u) = i<b,u> - <u,Ru>/2
//                        + int [e^{i<u,x>} - 1 - i<u,x> chi_{|x|<=1}] M(dx)
std::complex<double> levy_symbol(const LevyTriple& t, const Eigen::VectorXd& u,
                                 double tol = 1e-10);

// Frechet gradient of the symbol,
//   grad lambda(u) = i b - R u + int [i x e^{i<u,x>} - i x chi_{|x|<=1}] M(dx).
Eigen::VectorXcd levy_symbol_gradient(const LevyTriple& t, const Eigen::VectorXd& u,
                                      double tol = 1e-10);

// int (e^{i<y,a>}-1)(e^{i<y,b>}-1) M(dy); the jump part of the square field.
std::complex<double> jump_pair_symbol(const LevyTriple& t, const Eigen::VectorXd& a,
                                      const Eigen::VectorXd& b, double tol = 1e-10);

// Sampling state precomputed from a triple.  Power-law jumps below magnitude
// `jump_cut` are dropped; their (small) variance is recorded for diagnostics.
struct PreparedNoise {
    int dim = 0;
    Eigen::VectorXd drift;
    bool has_gauss = false;
    Eigen::MatrixXd sqrt_cov;
    struct PAtom {
        Eigen::VectorXd x;
        double rate;
        bool inside_unit_ball;
    };
    std::vector<PAtom> atoms;
    bool has_power_law = false;
    double pl_rate = 0.0;       // two-sided intensity above jump_cut
    double pl_alpha = 0.0;
    double pl_inv_a = 0.0;      // jump_cut^-alpha
    double pl_inv_b = 0.0;      // r_max^-alpha
    double dropped_variance = 0.0;
};

PreparedNoise prepare_noise(const LevyTriple& t, double jump_cut = 1e-4);

// One increment of the driving process over a step of length dt.  Atom jumps
// inside the unit ball are compensated; the symmetric power-law band needs no
// compensation.  Draw order is fixed (Gaussian, atoms, power law) so a given
// stream always yields the same increment sequence.
Eigen::VectorXd sample_increment_prepared(const PreparedNoise& p, double dt,
                                          Pcg64& rng);
Eigen::VectorXd sample_increment(const LevyTriple& t, double dt, Pcg64& rng);

}  // namespace oulevy
