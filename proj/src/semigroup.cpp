#include "oulevy/semigroup.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace oulevy {

namespace {

const std::complex<double> kI(0.0, 1.0);

// Complex dot product without conjugation.
std::complex<double> cdot(const Eigen::VectorXcd& a, const Eigen::VectorXd& b) {
    std::complex<double> s(0.0, 0.0);
    for (int i = 0; i < a.size(); ++i) s += a(i) * b(i);
    return s;
}

}  // namespace

KFunction apply_P_tau(const Scenario& sc, const KFunction& u, double tau) {
    if (tau < 0.0) throw std::invalid_argument("apply_P_tau needs tau >= 0");
    KFunction out(u.dim(), u.period());
    if (tau == 0.0) return u;
    const bool autonomous = sc.coefficients.A.is_constant();
    // The image closures outlive the caller's scenario reference, so keep a copy.
    auto scp = std::make_shared<const Scenario>(sc);
    for (const KTerm& term : u.terms()) {
        KTerm img;
        auto phiv = term.phi.value;
        auto hv = term.h.value;
        img.phi.value = [phiv, hv, scp, tau](double t) {
            Eigen::VectorXd h = hv(t + tau);
            std::complex<double> fac =
                kI * h.dot(drift_convolution(*scp, t, t + tau)) +
                symbol_time_integral(*scp, t, t + tau, h);
            return phiv(t + tau) * std::exp(fac);
        };
        if (term.h.constant && autonomous) {
            img.h = vector_const_fn(sc.family->adjoint(tau, 0.0) * *term.h.constant);
        } else {
            img.h.value = [hv, scp, tau](double t) -> Eigen::VectorXd {
                return scp->family->adjoint(t + tau, t) * hv(t + tau);
            };
        }
        out.add_term(std::move(img));
    }
    return out;
}

std::complex<double> p_tau_point(const Scenario& sc, const KFunction& u, double tau,
                                 double t, const Eigen::VectorXd& x) {
    if (tau < 0.0) throw std::invalid_argument("p_tau_point needs tau >= 0");
    if (tau == 0.0) return u(t, x);
    std::complex<double> out(0.0, 0.0);
    Eigen::VectorXd F = drift_convolution(sc, t, t + tau);
    for (const KTerm& term : u.terms()) {
        Eigen::VectorXd h = term.h.value(t + tau);
        std::complex<double> fac = kI * h.dot(F) +
                                   symbol_time_integral(sc, t, t + tau, h) +
                                   kI * x.dot(sc.family->adjoint(t + tau, t) * h);
        out += term.phi.value(t + tau) * std::exp(fac);
    }
    return out;
}

std::complex<double> two_param_apply(const Scenario& sc, double s, double t,
                                     const Eigen::VectorXd& h,
                                     const Eigen::VectorXd& x) {
    return char_fn(sc, s, t, x, h);
}

CkReport chapman_kolmogorov_check(const Scenario& sc, double s, double r, double t,
                                  const std::vector<Eigen::VectorXd>& hs,
                                  const std::vector<Eigen::VectorXd>& xs) {
    if (!(s <= r && r <= t))
        throw std::invalid_argument("chapman_kolmogorov_check needs s <= r <= t");
    CkReport rep;
    for (const auto& h : hs) {
        // P(r,t) e^{i<.,h>} = C * e^{i<., k>}.
        std::complex<double> C =
            std::exp(kI * h.dot(drift_convolution(sc, r, t)) +
                     symbol_time_integral(sc, r, t, h));
        Eigen::VectorXd k = sc.family->adjoint(t, r) * h;
        for (const auto& x : xs) {
            std::complex<double> composed = C * two_param_apply(sc, s, r, k, x);
            std::complex<double> direct = two_param_apply(sc, s, t, h, x);
            rep.defects.push_back(std::abs(composed - direct));
            rep.max_defect = std::max(rep.max_defect, rep.defects.back());
        }
    }
    return rep;
}

std::complex<double> Generator::operator()(double t, const Eigen::VectorXd& x) const {
    std::complex<double> out(0.0, 0.0);
    for (const GTerm& g : terms_) {
        std::complex<double> lin = g.alpha(t) + kI * cdot(g.beta(t), x);
        out += lin * std::polar(1.0, x.dot(g.h.value(t)));
    }
    return out;
}

Generator generator_L(const Scenario& sc, const KFunction& u) {
    if (!u.differentiable())
        throw std::invalid_argument(
            "generator_L needs phi' and h' closures on every term");
    Generator gen(u.dim());
    auto scp = std::make_shared<const Scenario>(sc);
    for (const KTerm& term : u.terms()) {
        Generator::GTerm g;
        g.h = term.h;
        auto phiv = term.phi.value;
        auto phid = term.phi.deriv;
        PeriodicVectorFn h = term.h;
        g.alpha = [phiv, phid, h, scp](double t) {
            Eigen::VectorXd hh = h.value(t);
            Eigen::VectorXd v = scp->coefficients.B(t).transpose() * hh;
            return phid(t) + kI * phiv(t) * scp->coefficients.f(t).dot(hh) +
                   phiv(t) * levy_symbol(scp->noise, v, scp->tols.quad_tol);
        };
        g.beta = [phiv, h, scp](double t) -> Eigen::VectorXcd {
            Eigen::VectorXd hh = h.value(t);
            Eigen::VectorXd real_part =
                h.derivative(t) + scp->coefficients.A(t).transpose() * hh;
            return phiv(t) * real_part.cast<std::complex<double>>();
        };
        gen.add_term(std::move(g));
    }
    return gen;
}

FdCheckReport generator_fd_check(const Scenario& sc, const KFunction& u,
                                 const std::vector<double>& dts,
                                 const std::vector<FdProbe>& probes) {
    Generator gen = generator_L(sc, u);
    FdCheckReport rep;
    rep.dts = dts;
    for (double dt : dts) {
        double worst = 0.0;
        for (const FdProbe& p : probes) {
            std::complex<double> quotient =
                (p_tau_point(sc, u, dt, p.t, p.x) - u(p.t, p.x)) / dt;
            worst = std::max(worst, std::abs(quotient - gen(p.t, p.x)));
        }
        rep.max_errors.push_back(worst);
    }
    for (std::size_t j = 0; j + 1 < rep.max_errors.size(); ++j)
        rep.ratios.push_back(rep.max_errors[j] /
                             std::max(rep.max_errors[j + 1], 1e-300));
    return rep;
}

SpaceTimeMeasure uniform_space_time(const Scenario& sc, int time_nodes) {
    SpaceTimeMeasure nu;
    nu.sc = &sc;
    const double T = sc.period();
    for (int i = 0; i < time_nodes; ++i) {
        nu.times.push_back(T * i / time_nodes);
        nu.weights.push_back(1.0 / time_nodes);
    }
    return nu;
}

std::complex<double> integrate_nu_t(const Scenario& sc, const KFunction& u, double t) {
    std::complex<double> out(0.0, 0.0);
    for (const KTerm& term : u.terms())
        out += term.phi.value(t) * esm_char_fn(sc, t, term.h.value(t));
    return out;
}

std::complex<double> integrate_nu(const SpaceTimeMeasure& nu, const KFunction& u) {
    std::complex<double> out(0.0, 0.0);
    for (std::size_t i = 0; i < nu.times.size(); ++i)
        out += nu.weights[i] * integrate_nu_t(*nu.sc, u, nu.times[i]);
    return out;
}

std::complex<double> integrate_nu_t_generator(const Scenario& sc, const Generator& g,
                                              double t) {
    std::complex<double> out(0.0, 0.0);
    for (const Generator::GTerm& term : g.terms()) {
        Eigen::VectorXd h = term.h.value(t);
        EsmCharGrad cg = esm_char_grad(sc, t, h);
        // int x_m e^{i<x,h>} nu_t(dx) = nu^(h) * (-i) grad_log_m.
        Eigen::VectorXcd first_moment = cg.value * (-kI) * cg.grad_log;
        std::complex<double> lin = term.alpha(t) * cg.value;
        Eigen::VectorXcd beta = term.beta(t);
        for (int m = 0; m < beta.size(); ++m)
            lin += kI * beta(m) * first_moment(m);
        out += lin;
    }
    return out;
}

std::complex<double> integrate_nu_generator(const SpaceTimeMeasure& nu,
                                            const Generator& g) {
    std::complex<double> out(0.0, 0.0);
    for (std::size_t i = 0; i < nu.times.size(); ++i)
        out += nu.weights[i] * integrate_nu_t_generator(*nu.sc, g, nu.times[i]);
    return out;
}

double variance_nu(const SpaceTimeMeasure& nu, const KFunction& u_real) {
    std::complex<double> mean = integrate_nu(nu, u_real);
    std::complex<double> second = integrate_nu(nu, u_real * u_real);
    return second.real() - mean.real() * mean.real();
}

ErgodicReport ergodic_average(const Scenario& sc, const KFunction& u, double t,
                              const Eigen::VectorXd& x, double tau_max, int n_grid) {
    ErgodicReport rep;
    SpaceTimeMeasure nu = uniform_space_time(sc, 64);
    rep.target = integrate_nu(nu, u);
    double ds = tau_max / n_grid;
    std::complex<double> acc(0.0, 0.0);
    std::complex<double> prev = u(t, x);
    for (int j = 1; j <= n_grid; ++j) {
        std::complex<double> cur = p_tau_point(sc, u, j * ds, t, x);
        acc += 0.5 * (prev + cur) * ds;
        prev = cur;
        rep.taus.push_back(j * ds);
        rep.averages.push_back(acc / (j * ds));
    }
    return rep;
}

}  // namespace oulevy
