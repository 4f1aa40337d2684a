#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "oulevy/kfunction.hpp"
#include "oulevy/measures.hpp"
#include "oulevy/solution.hpp"

namespace oulevy {

// One-parameter semigroup on the time-extended space,
//   (P_tau u)(t,x) = E[ u(t+tau, X(t+tau, t, x)) ],
// evaluated in closed form on the core: each exponential term maps to
//   phi(t+tau) * exp(i<h(t+tau), int_t^{t+tau} U f>)
//            * exp(int_t^{t+tau} lambda(B* U(t+tau,.)* h(t+tau)))
//            * exp(i<x, U*(t+tau,t) h(t+tau)>).
KFunction apply_P_tau(const Scenario& sc, const KFunction& u, double tau);

// Same closed form at a single point (cheaper when no reuse is needed).
std::complex<double> p_tau_point(const Scenario& sc, const KFunction& u, double tau,
                                 double t, const Eigen::VectorXd& x);

// Two-parameter action P(s,t) applied to x -> e^{i<x,h>}, evaluated at x.
std::complex<double> two_param_apply(const Scenario& sc, double s, double t,
                                     const Eigen::VectorXd& h,
                                     const Eigen::VectorXd& x);

// Flow property P(s,r) P(r,t) = P(s,t) through exponential probes.
struct CkReport {
    std::vector<double> defects;
    double max_defect = 0.0;
};
CkReport chapman_kolmogorov_check(const Scenario& sc, double s, double r, double t,
                                  const std::vector<Eigen::VectorXd>& hs,
                                  const std::vector<Eigen::VectorXd>& xs);

// Generator applied to a differentiable core function:
//   (L u)(t,x) = sum_j [alpha_j(t) + i<beta_j(t),x>] e^{i<x,h_j(t)>},
//   alpha = phi' + i phi <f,h> + phi lambda(B*h),
//   beta  = phi (h' + A(t)^T h).
// The structured form is what the slice-measure integrals consume.
class Generator {
  public:
    struct GTerm {
        std::function<std::complex<double>(double)> alpha;
        std::function<Eigen::VectorXcd(double)> beta;
        PeriodicVectorFn h;
    };

    explicit Generator(int dim) : dim_(dim) {}
    std::complex<double> operator()(double t, const Eigen::VectorXd& x) const;
    const std::vector<GTerm>& terms() const { return terms_; }
    void add_term(GTerm g) { terms_.push_back(std::move(g)); }
    int dim() const { return dim_; }

  private:
    int dim_;
    std::vector<GTerm> terms_;
};

// Throws std::invalid_argument when u lacks derivative closures.
Generator generator_L(const Scenario& sc, const KFunction& u);

// Finite-difference consistency of L: for each dt the max over probes of
// |(P_dt u - u)/dt - Lu|; for smooth u the error halves ratio should sit
// near 2 when dt halves.
struct FdProbe {
    double t;
    Eigen::VectorXd x;
};
struct FdCheckReport {
    std::vector<double> dts;
    std::vector<double> max_errors;
    std::vector<double> ratios;  // max_errors[j] / max_errors[j+1]
};
FdCheckReport generator_fd_check(const Scenario& sc, const KFunction& u,
                                 const std::vector<double>& dts,
                                 const std::vector<FdProbe>& probes);

// Product measure nu = nu_t (x) dt/T on one period, realized as quadrature
// times; slice integrals reduce to characteristic-function evaluations.
struct SpaceTimeMeasure {
    const Scenario* sc = nullptr;
    std::vector<double> times;
    std::vector<double> weights;  // sum to 1
};
SpaceTimeMeasure uniform_space_time(const Scenario& sc, int time_nodes = 64);

std::complex<double> integrate_nu_t(const Scenario& sc, const KFunction& u, double t);
std::complex<double> integrate_nu(const SpaceTimeMeasure& nu, const KFunction& u);
std::complex<double> integrate_nu_t_generator(const Scenario& sc, const Generator& g,
                                              double t);
std::complex<double> integrate_nu_generator(const SpaceTimeMeasure& nu,
                                            const Generator& g);

// Variance of a real core function under nu.
double variance_nu(const SpaceTimeMeasure& nu, const KFunction& u_real);

// Cesaro average (1/tau) int_0^tau (P_s u)(t,x) ds on a uniform s-grid,
// reported cumulatively, with the nu-integral as the ergodic target.
struct ErgodicReport {
    std::vector<double> taus;
    std::vector<std::complex<double>> averages;
    std::complex<double> target;
};
ErgodicReport ergodic_average(const Scenario& sc, const KFunction& u, double t,
                              const Eigen::VectorXd& x, double tau_max, int n_grid);

}  // namespace oulevy
