#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "oulevy/periodic.hpp"

namespace oulevy {

// Periodic scalar coefficient t -> phi(t); deriv may be empty when the
// closed-form derivative is not available (e.g. after a semigroup image).
struct PeriodicScalarFn {
    std::function<std::complex<double>(double)> value;
    std::function<std::complex<double>(double)> deriv;
};

// Periodic frequency vector t -> h(t); `constant` is set when h does not
// depend on t (enables exact term merging and constant-aware shortcuts).
struct PeriodicVectorFn {
    std::function<Eigen::VectorXd(double)> value;
    std::function<Eigen::VectorXd(double)> deriv;
    std::optional<Eigen::VectorXd> constant;

    bool differentiable() const { return constant.has_value() || bool(deriv); }
    Eigen::VectorXd derivative(double t) const {
        if (deriv) return deriv(t);
        return Eigen::VectorXd::Zero(constant->size());
    }
};

PeriodicScalarFn scalar_const_fn(std::complex<double> c);
PeriodicScalarFn scalar_fourier_fn(FourierSeries<std::complex<double>> s);
PeriodicVectorFn vector_const_fn(Eigen::VectorXd v);
PeriodicVectorFn vector_fourier_fn(FourierSeries<Eigen::VectorXd> s);

struct KTerm {
    PeriodicScalarFn phi;
    PeriodicVectorFn h;
};

// Finite sum u(t,x) = sum_j phi_j(t) exp(i <x, h_j(t)>) with T-periodic
// coefficients: the linear span used as a core for the semigroup.  Closed
// under sums, products, conjugation and scalar modulation.
class KFunction {
  public:
    KFunction(int dim, double period) : dim_(dim), period_(period) {}

    static KFunction term(int dim, double period, PeriodicScalarFn phi,
                          PeriodicVectorFn h);
    // phi0 * exp(i<x,h>) with both pieces constant in t.
    static KFunction exponential(double period, std::complex<double> phi0,
                                 Eigen::VectorXd h);
    static KFunction constant(int dim, double period, std::complex<double> c);
    static KFunction fourier(double period, FourierSeries<std::complex<double>> phi,
                             FourierSeries<Eigen::VectorXd> h);

    int dim() const { return dim_; }
    double period() const { return period_; }
    const std::vector<KTerm>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    std::complex<double> operator()(double t, const Eigen::VectorXd& x) const;
    Eigen::VectorXcd gradient_x(double t, const Eigen::VectorXd& x) const;

    // All terms carry usable phi' and h' closures.
    bool differentiable() const;

    KFunction operator+(const KFunction& o) const;
    KFunction operator*(const KFunction& o) const;
    KFunction scaled(std::complex<double> c) const;
    // Multiplication by a periodic scalar factor (frequency content of x
    // unchanged).
    KFunction modulated(PeriodicScalarFn theta) const;
    KFunction conjugated() const;
    KFunction real_part() const;

    // Merges terms whose h is the same constant vector (bitwise); keeps
    // non-constant-h terms as they are.
    KFunction simplified() const;

    void add_term(KTerm term) { terms_.push_back(std::move(term)); }

  private:
    int dim_;
    double period_;
    std::vector<KTerm> terms_;
};

}  // namespace oulevy
