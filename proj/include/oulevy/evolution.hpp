#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "oulevy/periodic.hpp"

namespace oulevy {

// Time-periodic coefficients of dX = (A(t)X + f(t)) dt + B(t) dL.
struct PeriodicCoefficients {
    double period = 1.0;
    FourierSeries<Eigen::MatrixXd> A;
    FourierSeries<Eigen::VectorXd> f;
    FourierSeries<Eigen::MatrixXd> B;

    int dimension() const { return static_cast<int>(A.constant.rows()); }
};

// Throws if shapes or periods are inconsistent.
void validate_coefficients(const PeriodicCoefficients& c);

// sup over one period of the operator 2-norm, sampled on a uniform grid.
double sup_op_norm(const FourierSeries<Eigen::MatrixXd>& s, int grid = 512);
double sup_norm(const FourierSeries<Eigen::VectorXd>& s, int grid = 512);
double op_norm2(const Eigen::MatrixXd& m);

class NotExponentiallyStable : public std::runtime_error {
  public:
    explicit NotExponentiallyStable(double fitted_rate)
        : std::runtime_error("evolution family is not exponentially stable "
                             "(fitted decay rate " +
                             std::to_string(fitted_rate) + ")"),
          rate(fitted_rate) {}
    double rate;
};

// Envelope ||U(s+tau,s)|| <= bound * exp(-rate*tau), valid on the sampled
// range and used to truncate integrals with lower limit -infinity.
struct StabilityEnvelope {
    double bound = 1.0;
    double rate = 0.0;
};

// Propagator family U(t,s) of dU/dt = A(t)U, U(s,s) = I.  One period is
// resolved on a uniform cache grid; arbitrary (t,s) are composed from cached
// span products, powers of the period map U(T,0), and short integrations of
// the two off-grid ends.  Periodicity U(t+T,s+T) = U(t,s) holds by argument
// reduction.
class EvolutionFamily {
  public:
    explicit EvolutionFamily(PeriodicCoefficients coeffs, double ode_tol = 1e-12,
                             int grid = 256);

    int dim() const { return dim_; }
    double period() const { return coeffs_.period; }
    double ode_tol() const { return ode_tol_; }
    const PeriodicCoefficients& coefficients() const { return coeffs_; }

    Eigen::MatrixXd propagator(double t, double s) const;
    Eigen::MatrixXd adjoint(double t, double s) const {
        return propagator(t, s).transpose();
    }
    // Monodromy power U(T,0)^q, via cached squarings.
    Eigen::MatrixXd period_power(long long q) const;

    // Least-squares fit of log||U(s+tau,s)|| over sampled (s,tau); the bound
    // is inflated so every sample is dominated.  Throws NotExponentiallyStable
    // when the fitted rate is not positive.
    StabilityEnvelope stability_envelope(double horizon) const;

  private:
    Eigen::MatrixXd integrate_segment(double a, double b) const;
    Eigen::MatrixXd span(int i, int j) const;       // U(g_j, g_i), grid indices

    PeriodicCoefficients coeffs_;
    double ode_tol_;
    int grid_;
    int dim_;
    double h_;
    std::vector<std::vector<Eigen::MatrixXd>> spans_;  // spans_[l][i] = U(g_{i+2^l}, g_i)
    mutable std::vector<Eigen::MatrixXd> period_pows_;  // U(T,0)^(2^k)
};

}  // namespace oulevy
