#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "oulevy/evolution.hpp"
#include "oulevy/levy.hpp"
#include "oulevy/rng.hpp"

namespace oulevy {

struct ScenarioTols {
    double ode_tol = 1e-12;   // propagator integration
    double quad_tol = 1e-10;  // time quadratures over finite windows
    double tail_tol = 1e-9;   // truncation of integrals from -infinity
};

// A fully validated model instance: coefficients, noise, cached evolution
// family, stability envelope, and sampling state.  All higher-level
// operations take a Scenario.
struct Scenario {
    PeriodicCoefficients coefficients;
    LevyTriple noise;
    std::uint64_t master_seed = 0;
    ScenarioTols tols;

    std::shared_ptr<const EvolutionFamily> family;
    StabilityEnvelope envelope;
    PreparedNoise prepared;
    double sup_B = 0.0;        // sup_t ||B(t)||
    double sup_f = 0.0;        // sup_t |f(t)|
    double grad_cap = 0.0;     // max ||grad lambda|| on the sampled ball
    double grad_cap_radius = 0.0;

    int dim() const { return coefficients.dimension(); }
    double period() const { return coefficients.period; }
};

// Validates everything and builds the caches.  Throws std::invalid_argument
// on malformed input and NotExponentiallyStable when no decaying envelope
// can be fitted.
Scenario make_scenario(PeriodicCoefficients coeffs, LevyTriple noise,
                       std::uint64_t master_seed, ScenarioTols tols = {});

inline double neg_infinity() { return -std::numeric_limits<double>::infinity(); }

// Max of ||grad lambda(u)|| over ||u|| <= radius (sampled); lambda is then
// dominated by grad_bound * ||u|| on that ball.
double symbol_grad_bound(const Scenario& sc, double radius);

// Number of whole periods after which an integrand bounded by
// amplitude * exp(-rate * age) contributes less than tol in total.
long long tail_periods(const Scenario& sc, double amplitude, double rate, double tol);

// int_s^t U(t,r) f(r) dr; s may be -infinity (envelope-based truncation).
Eigen::VectorXd drift_convolution(const Scenario& sc, double s, double t);

// int_s^t lambda(B(r)* U(t,r)* h) dr; s may be -infinity.
std::complex<double> symbol_time_integral(const Scenario& sc, double s, double t,
                                          const Eigen::VectorXd& h);

// int_s^t U(t,r) B(r) grad lambda(B(r)* U(t,r)* h) dr; s may be -infinity.
Eigen::VectorXcd symbol_grad_time_integral(const Scenario& sc, double s, double t,
                                           const Eigen::VectorXd& h);

// int_s^t U(t,r) B(r) R B(r)* U(t,r)* dr; s may be -infinity.
Eigen::MatrixXd covariance_window(const Scenario& sc, double s, double t);

// Characteristic function of the mild solution started at (s,x):
//   E exp(i<h, X(t,s,x)>) = exp(i<h, U(t,s)x + int_s^t U f>)
//                           * exp(int_s^t lambda(B* U(t,.)* h)).
std::complex<double> char_fn(const Scenario& sc, double s, double t,
                             const Eigen::VectorXd& x, const Eigen::VectorXd& h);

struct SimulateOptions {
    bool store_paths = false;
    int workers = 1;
    std::uint32_t stream_domain = 0;
    // When set, the weak-form pairing against this test vector is accumulated
    // per path during the walk (avoids storing full paths for large runs).
    std::optional<Eigen::VectorXd> weak_y;
};

struct PathEnsemble {
    double s = 0.0, t = 0.0, dt = 0.0;
    Eigen::VectorXd x0;
    std::vector<double> grid;                          // r_0 .. r_K
    std::vector<Eigen::VectorXd> terminal;             // one per path
    bool stored = false;
    std::vector<std::vector<Eigen::VectorXd>> states;      // [path][0..K]
    std::vector<std::vector<Eigen::VectorXd>> increments;  // [path][0..K-1]
    std::optional<Eigen::VectorXd> weak_y;
    std::vector<double> weak_residuals;                // one per path if weak_y
};

// Exact-propagator recursion X_{k+1} = U(r_{k+1},r_k)(X_k + B(r_k) dL_k) + d_k
// with d_k the drift convolution over the step; only the noise sum carries
// the left-endpoint O(dt) discretization error.  Path p always draws from
// stream (stream_domain, p) regardless of worker count.
PathEnsemble simulate_paths(const Scenario& sc, double s, double t,
                            const Eigen::VectorXd& x0, double dt, int n_paths,
                            const SimulateOptions& opts = {});

Eigen::VectorXd ensemble_mean(const std::vector<Eigen::VectorXd>& xs);
Eigen::MatrixXd ensemble_covariance(const std::vector<Eigen::VectorXd>& xs);

struct EmpiricalChar {
    std::complex<double> value;
    double se_real = 0.0;
    double se_imag = 0.0;
};
EmpiricalChar empirical_char(const std::vector<Eigen::VectorXd>& xs,
                             const Eigen::VectorXd& h);

// Pairing of one path against a test vector y:
//   <X_T,y> - <X_s,y> - sum_k <A(r_k)X_k + f(r_k), y> dt - sum_k <B(r_k)*y, dL_k>.
struct WeakResidualReport {
    int n = 0;
    double mean = 0.0;
    double se = 0.0;
    std::vector<double> residuals;
};
// Computes residuals from stored paths, or reuses the per-path accumulation
// when the ensemble was simulated with the same weak_y.
WeakResidualReport weak_residual(const Scenario& sc, const PathEnsemble& ens,
                                 const Eigen::VectorXd& y);
WeakResidualReport residual_stats(const std::vector<double>& residuals);

}  // namespace oulevy
