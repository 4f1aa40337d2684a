#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "oulevy/semigroup.hpp"

namespace oulevy {

// Square field on the core, as a bilinear map evaluated termwise:
//   Gamma(u,v) = <sqrtR B* grad u, sqrtR B* grad v>
//              + int [u(x+B(t)y)-u(x)][v(x+B(t)y)-v(x)] M(dy);
// each (j,k) term pair contributes
//   phi_j phi_k [ -<B*h_j, R B*h_k> + P(B*h_j, B*h_k) ] e^{i<x,h_j+h_k>}
// with P the pair symbol of the jump measure.
KFunction square_field(const Scenario& sc, const KFunction& u, const KFunction& v);
// Jump part alone (zero function when the noise has no jumps).
KFunction square_field_jump(const Scenario& sc, const KFunction& u,
                            const KFunction& v);
// Gradient part alone.
KFunction square_field_grad(const Scenario& sc, const KFunction& u,
                            const KFunction& v);

class ConstantsUnavailable : public std::runtime_error {
  public:
    explicit ConstantsUnavailable(const std::string& why)
        : std::runtime_error("constants estimator unavailable: " + why) {}
};

// Gradient-transport constant  c1(tau) = sup_t || sqrtR^-1 U(t+tau,t) sqrtR ||^2.
// Needs invertible R and B = Id.
double estimate_c1(const Scenario& sc, double tau, int t_grid = 48);

// Jump-transport constant for the scalar power-law family,
//   c2(tau) = sup_t |U(t+tau,t)|^alpha  (B = Id); returns 0 when the noise
// has no jump part, and refuses atomic measures (no density ratio exists).
double estimate_c2(const Scenario& sc, double tau, int t_grid = 48);

// Closed-form or estimated transport constants consumed by the inequality
// checks.  Estimated ones get an extra 1% headroom inside the checks;
// user-supplied closed forms are used as given.
struct ConstantsSpec {
    std::function<double(double)> c1;
    std::function<double(double)> c2;
    bool c1_estimated = false;
    bool c2_estimated = false;
};
ConstantsSpec estimated_constants(const Scenario& sc, int t_grid = 48);

// int_0^infinity max(c1, c2) for decaying constants, integrated over doubling
// windows until the remainder is negligible.  The dropped tail only makes the
// limiting Poincare constant smaller, never larger.
double transport_integral_infinity(const ConstantsSpec& cs);

// Intrinsic distance rho(x,y) = |sqrtR^+ (x-y)|, infinite when x-y is not in
// the range of sqrtR (checked by reconstruction residual).
double rho_distance(const Eigen::MatrixXd& R, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y);

// E[g(X(t+tau, t, x))] for a general scalar g: Gauss-Hermite over the
// Gaussian part and Poisson-count enumeration over the (re-discretized)
// window jump cloud.  Infinite-activity noise is not supported here.
double transition_expectation(const Scenario& sc, double t, double tau,
                              const Eigen::VectorXd& x,
                              const std::function<double(const Eigen::VectorXd&)>& g,
                              int max_jumps = 6);

struct PoincareReport {
    double variance = 0.0;     // Var_nu(P_tau u)
    double carre_mean = 0.0;   // int Gamma(u,u) d nu
    double c_value = 0.0;      // max of the two transport integrals
    double slack = 0.0;        // c_value * carre_mean - variance
};
PoincareReport poincare_check(const Scenario& sc, const KFunction& u_real,
                              double tau, const ConstantsSpec& cs,
                              int time_nodes = 64);
// tau -> infinity form Var_nu(u) <= c_infinity * int Gamma d nu.
PoincareReport poincare_limit_check(const Scenario& sc, const KFunction& u_real,
                                    double c_infinity, int time_nodes = 64);

struct HarnackReport {
    double lhs = 0.0;           // (P_tau u (t,x))^2
    double rhs = 0.0;           // P_tau(u^2)(t,y) * factor
    double slack = 0.0;         // rhs - lhs
    double rho_value = 0.0;
    double inverse_c1_integral = 0.0;
    double factor = 0.0;        // exp(rho^2 / int_0^tau c1(s)^-1 ds)
};
HarnackReport harnack_check(const Scenario& sc, const KFunction& u_positive,
                            double tau, double t, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y, const ConstantsSpec& cs);

// Pointwise transport estimates of the two halves of the square field.
struct EstimateCheckReport {
    std::vector<double> lhs, rhs;
    double min_slack = 0.0;  // min of rhs - lhs
};
// |sqrtR grad(P_tau u)|(t,x) <= sqrt(c1(tau)) P_tau(|sqrtR grad u|)(t,x).
EstimateCheckReport gradient_estimate_check(const Scenario& sc,
                                            const KFunction& u_real, double tau,
                                            const std::vector<FdProbe>& probes,
                                            const ConstantsSpec& cs);
// Gamma_jump(P_tau u) <= c2(tau) P_tau(Gamma_jump(u)) pointwise.
EstimateCheckReport jump_estimate_check(const Scenario& sc,
                                        const KFunction& u_real, double tau,
                                        const std::vector<FdProbe>& probes,
                                        const ConstantsSpec& cs);

}  // namespace oulevy
