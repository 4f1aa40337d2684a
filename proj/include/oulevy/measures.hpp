#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <variant>
#include <vector>

#include "oulevy/solution.hpp"

namespace oulevy {

// Discretized jump measure of a time slice: either a weighted atom cloud
// (atom-list noise) or weighted scale copies of the base density (power-law
// noise, slice scale u meaning pushforward under y = u x).
struct JumpAtomCloud {
    std::vector<Atom> atoms;
};
struct JumpDensitySlices {
    PowerLawDensity base;
    std::vector<std::pair<double, double>> scale_weight;  // (u, time weight)
};

// Infinitely divisible law of one time slice of the evolution system of
// measures (s = -infinity) or of a finite noise-convolution window.  The
// mean uses the chi_{|y|<=1} truncation convention, so it already contains
// the indicator-mismatch correction between original and mapped jumps.
struct IDLaw {
    double window_start = 0.0;  // -infinity for limit laws
    double t = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    std::variant<std::monostate, JumpAtomCloud, JumpDensitySlices> jumps;

    // Exact functionals of the mapped jump measure (crossing-aware time
    // integrals, not read off the discretized cloud).
    double jump_small_square = 0.0;     // int min(1,|y|^2) dM
    double jump_mass_above_unit = 0.0;  // M({|y| > 1})

    long long truncation_periods = 0;
    double tail_bound = 0.0;
};

IDLaw limit_law(const Scenario& sc, double t);
IDLaw window_law(const Scenario& sc, double s, double t);

// Characteristic function of the slice nu_t:
//   nu_t^(h) = exp( i<h, int_-inf^t U f> + int_-inf^t lambda(B* U(t,.)* h) ).
std::complex<double> esm_char_fn(const Scenario& sc, double t,
                                 const Eigen::VectorXd& h);

// Same value together with grad_h log nu_t^(h); the slice moment identity
//   int x e^{i<x,h>} nu_t(dx) = nu_t^(h) * (-i) * grad_log
// is what the mean-zero check consumes.
struct EsmCharGrad {
    std::complex<double> value;
    Eigen::VectorXcd grad_log;
};
EsmCharGrad esm_char_grad(const Scenario& sc, double t, const Eigen::VectorXd& h);

// Characteristic exponent assembled from the IDLaw fields; compare with
// continuous_log_esm to confirm the triple represents the same law.
std::complex<double> law_char_exponent(const Scenario& sc, const IDLaw& law,
                                       const Eigen::VectorXd& h);

// log nu_t^(h) continued continuously along the ray tau -> tau*h from tau=0,
// so no branch ambiguity enters the comparison.
std::complex<double> continuous_log_esm(const Scenario& sc, double t,
                                        const Eigen::VectorXd& h, int steps = 64);

// Flow-invariance defect |P(s,t) applied to nu_s - nu_t| through probe
// characteristic directions.
struct InvarianceReport {
    std::vector<double> defects;
    double max_defect = 0.0;
};
InvarianceReport check_invariance(const Scenario& sc, double s, double t,
                                  const std::vector<Eigen::VectorXd>& probes);

// Backward fixed-point iteration: prod_{j<K} factor((M*)^j h) with
// M* = U(t,t-T)^T and factor the one-period characteristic factor at t.
// iters = 0 picks K from the contraction rate.
std::complex<double> uniqueness_iteration(const Scenario& sc, double t,
                                          const Eigen::VectorXd& h, int iters = 0);

// Draws from nu_t by simulating from a burn-in start t - burn*T at x = 0.
// burn_periods = 0 picks the burn-in from the stability envelope.
std::vector<Eigen::VectorXd> sample_nu(const Scenario& sc, double t, int n_paths,
                                       double dt, int burn_periods = 0,
                                       const SimulateOptions& opts = {});

// Kolmogorov-Smirnov distance of scalar samples against a reference CDF, and
// the large-n critical value at level alpha.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);
double ks_critical(double alpha, int n);
double normal_cdf(double x, double mean, double variance);

}  // namespace oulevy
