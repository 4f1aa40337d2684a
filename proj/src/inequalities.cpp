#include "oulevy/inequalities.hpp"

#include <cmath>
#include <memory>

#include "oulevy/quadrature.hpp"

namespace oulevy {

namespace {

enum class GammaPart { kFull, kGrad, kJump };

KFunction square_field_impl(const Scenario& sc, const KFunction& u,
                            const KFunction& v, GammaPart part) {
    KFunction out(u.dim(), u.period());
    // The closures outlive the caller's scenario reference, so keep a copy.
    auto scp = std::make_shared<const Scenario>(sc);
    for (const KTerm& a : u.terms()) {
        for (const KTerm& b : v.terms()) {
            KTerm g;
            auto pa = a.phi.value, pb = b.phi.value;
            auto ha = a.h, hb = b.h;
            g.phi.value = [pa, pb, ha, hb, scp, part](double t) {
                Eigen::VectorXd va = scp->coefficients.B(t).transpose() * ha.value(t);
                Eigen::VectorXd vb = scp->coefficients.B(t).transpose() * hb.value(t);
                std::complex<double> kernel(0.0, 0.0);
                if (part != GammaPart::kJump)
                    kernel -= va.dot(scp->noise.covariance * vb);
                if (part != GammaPart::kGrad)
                    kernel += jump_pair_symbol(scp->noise, va, vb,
                                               scp->tols.quad_tol);
                return pa(t) * pb(t) * kernel;
            };
            if (ha.constant && hb.constant) {
                g.h = vector_const_fn(*ha.constant + *hb.constant);
            } else {
                g.h.value = [ha, hb](double t) -> Eigen::VectorXd {
                    return ha.value(t) + hb.value(t);
                };
            }
            out.add_term(std::move(g));
        }
    }
    return out.simplified();
}

double apply_headroom(double value, bool estimated) {
    return estimated ? 1.01 * value : value;
}

void require_b_identity(const Scenario& sc, const char* what) {
    const int d = sc.dim();
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < 64; ++i) {
        double t = sc.period() * i / 64;
        if ((sc.coefficients.B(t) - id).norm() > 1e-10)
            throw ConstantsUnavailable(std::string(what) + " assumes B = Id");
    }
}

}  // namespace

KFunction square_field(const Scenario& sc, const KFunction& u, const KFunction& v) {
    return square_field_impl(sc, u, v, GammaPart::kFull);
}
KFunction square_field_jump(const Scenario& sc, const KFunction& u,
                            const KFunction& v) {
    return square_field_impl(sc, u, v, GammaPart::kJump);
}
KFunction square_field_grad(const Scenario& sc, const KFunction& u,
                            const KFunction& v) {
    return square_field_impl(sc, u, v, GammaPart::kGrad);
}

double estimate_c1(const Scenario& sc, double tau, int t_grid) {
    require_b_identity(sc, "c1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sc.noise.covariance);
    double emin = es.eigenvalues().minCoeff();
    if (emin <= 1e-12 * (1.0 + es.eigenvalues().maxCoeff()))
        throw ConstantsUnavailable("c1 needs invertible covariance");
    Eigen::MatrixXd sq = matrix_sqrt_psd(sc.noise.covariance);
    Eigen::MatrixXd sqi =
        es.eigenvectors() *
        es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
        es.eigenvectors().transpose();
    double best = 0.0;
    for (int i = 0; i < t_grid; ++i) {
        double t = sc.period() * i / t_grid;
        double n = op_norm2(sqi * sc.family->propagator(t + tau, t) * sq);
        best = std::max(best, n * n);
    }
    return best;
}

double estimate_c2(const Scenario& sc, double tau, int t_grid) {
    if (sc.noise.jumps.empty()) return 0.0;
    if (sc.noise.jumps.atoms())
        throw ConstantsUnavailable("c2 needs a jump density (atoms have no ratio)");
    require_b_identity(sc, "c2");
    const double alpha = sc.noise.jumps.power_law()->alpha;
    double best = 0.0;
    for (int i = 0; i < t_grid; ++i) {
        double t = sc.period() * i / t_grid;
        best = std::max(
            best, std::pow(std::abs(sc.family->propagator(t + tau, t)(0, 0)), alpha));
    }
    return best;
}

ConstantsSpec estimated_constants(const Scenario& sc, int t_grid) {
    ConstantsSpec cs;
    auto scp = std::make_shared<const Scenario>(sc);
    cs.c1 = [scp, t_grid](double tau) { return estimate_c1(*scp, tau, t_grid); };
    cs.c1_estimated = true;
    cs.c2 = [scp, t_grid](double tau) { return estimate_c2(*scp, tau, t_grid); };
    cs.c2_estimated = true;
    return cs;
}

double transport_integral_infinity(const ConstantsSpec& cs) {
    auto value = [&](double s) {
        double v = cs.c1 ? cs.c1(s) : 0.0;
        if (cs.c2) v = std::max(v, cs.c2(s));
        return v;
    };
    double total = 0.0, a = 0.0, w = 1.0;
    for (int k = 0; k < 40; ++k) {
        double seg = quad::adaptive(value, a, a + w, 1e-12);
        total += seg;
        a += w;
        w *= 2.0;
        if (std::abs(seg) < 1e-12 * std::max(total, 1.0) && value(a) < 1e-13)
            break;
    }
    return total;
}

double rho_distance(const Eigen::MatrixXd& R, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) {
    Eigen::VectorXd d = x - y;
    if (d.norm() == 0.0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    double emax = es.eigenvalues().maxCoeff();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(d.size());
    for (int i = 0; i < d.size(); ++i) {
        double ev = es.eigenvalues()(i);
        if (ev > 1e-13 * std::max(emax, 1.0)) {
            double proj = es.eigenvectors().col(i).dot(d);
            z += (proj / std::sqrt(ev)) * es.eigenvectors().col(i);
        }
    }
    Eigen::MatrixXd sq = matrix_sqrt_psd(R);
    if ((sq * z - d).norm() > 1e-10 * d.norm())
        return std::numeric_limits<double>::infinity();
    return z.norm();
}

double transition_expectation(const Scenario& sc, double t, double tau,
                              const Eigen::VectorXd& x,
                              const std::function<double(const Eigen::VectorXd&)>& g,
                              int max_jumps) {
    if (sc.noise.jumps.power_law())
        throw std::runtime_error(
            "transition_expectation: infinite-activity noise not supported");
    IDLaw law = window_law(sc, t, t + tau);
    Eigen::VectorXd mu = sc.family->propagator(t + tau, t) * x + law.mean;

    // Gaussian directions with positive variance.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(law.covariance);
    std::vector<Eigen::VectorXd> axes;
    for (int i = 0; i < sc.dim(); ++i) {
        double ev = es.eigenvalues()(i);
        if (ev > 1e-14)
            axes.push_back(std::sqrt(2.0 * ev) * es.eigenvectors().col(i));
    }
    int n_gh = axes.size() <= 1 ? 64 : (axes.size() == 2 ? 32 : 12);
    const quad::Rule gh = quad::gauss_hermite(n_gh);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);

    // Window jump cloud against the base atoms, re-discretized coarsely:
    // the Poisson-count enumeration below is exponential in the cloud size.
    std::vector<std::pair<Eigen::VectorXd, double>> cloud;
    if (std::holds_alternative<JumpAtomCloud>(law.jumps)) {
        const AtomList* base = sc.noise.jumps.atoms();
        const quad::Rule gl = quad::gauss_legendre(6);
        for (const Atom& atom : base->atoms) {
            double c = t + 0.5 * tau, hw = 0.5 * tau;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                double r = c + hw * gl.nodes[q];
                Eigen::VectorXd y = sc.family->propagator(t + tau, r) *
                                    (sc.coefficients.B(r) * atom.location);
                cloud.emplace_back(y, hw * gl.weights[q] * atom.intensity);
            }
        }
    }

    std::function<double(const Eigen::VectorXd&)> gauss_layer =
        [&](const Eigen::VectorXd& center) {
            if (axes.empty()) return g(center);
            // Tensor Gauss-Hermite over the positive-variance axes.
            std::function<double(std::size_t, const Eigen::VectorXd&)> rec =
                [&](std::size_t k, const Eigen::VectorXd& c) -> double {
                if (k == axes.size()) return g(c);
                double acc = 0.0;
                for (int q = 0; q < n_gh; ++q)
                    acc += gh.weights[q] * inv_sqrt_pi *
                           rec(k + 1, c + gh.nodes[q] * axes[k]);
                return acc;
            };
            return rec(0, center);
        };

    if (cloud.empty()) return gauss_layer(mu);

    // law.mean carries the chi_{|y|<=1} compensator of the mapped law, but the
    // enumeration below adds raw jumps.  Recenter on the raw representation:
    // drift convolution minus the base-ball compensator, which only involves
    // the smooth integrand U(t+tau,r) B(r) y per atom inside the unit ball.
    mu = sc.family->propagator(t + tau, t) * x + drift_convolution(sc, t, t + tau);
    for (const Atom& atom : sc.noise.jumps.atoms()->atoms) {
        if (atom.location.norm() > 1.0) continue;
        for (int m = 0; m < sc.dim(); ++m)
            mu(m) -= atom.intensity *
                     quad::adaptive(
                         [&](double r) {
                             return (sc.family->propagator(t + tau, r) *
                                     (sc.coefficients.B(r) * atom.location))(m);
                         },
                         t, t + tau, 1e-12);
    }
    double lambda_total = 0.0;
    for (const auto& [y, wgt] : cloud) lambda_total += wgt;
    double prefactor = std::exp(-lambda_total);
    // E[g] = e^{-L} sum_m (1/m!) sum over ordered m-tuples of cloud draws of
    // (prod w) g(mu + sum y); truncation error ~ L^{m+1}/(m+1)! * sup|g|.
    double total = prefactor * gauss_layer(mu);
    double factorial = 1.0;
    for (int m = 1; m <= max_jumps; ++m) {
        factorial *= m;
        std::function<void(int, Eigen::VectorXd, double)> tuples =
            [&](int left, Eigen::VectorXd shift, double wgt) {
                if (wgt / factorial < 1e-14) return;
                if (left == 0) {
                    total += prefactor * wgt / factorial * gauss_layer(mu + shift);
                    return;
                }
                for (const auto& [y, w] : cloud)
                    tuples(left - 1, shift + y, wgt * w);
            };
        tuples(m, Eigen::VectorXd::Zero(sc.dim()), 1.0);
        if (std::pow(lambda_total, m + 1) / (factorial * (m + 1)) < 1e-11) break;
    }
    return total;
}

PoincareReport poincare_check(const Scenario& sc, const KFunction& u_real,
                              double tau, const ConstantsSpec& cs,
                              int time_nodes) {
    SpaceTimeMeasure nu = uniform_space_time(sc, time_nodes);
    PoincareReport rep;
    KFunction img = apply_P_tau(sc, u_real, tau);
    rep.variance = variance_nu(nu, img);
    rep.carre_mean = integrate_nu(nu, square_field(sc, u_real, u_real)).real();
    double i1 = 0.0, i2 = 0.0;
    if (cs.c1)
        i1 = apply_headroom(
            quad::adaptive([&](double s) { return cs.c1(s); }, 0.0, tau, 1e-10),
            cs.c1_estimated);
    if (cs.c2)
        i2 = apply_headroom(
            quad::adaptive([&](double s) { return cs.c2(s); }, 0.0, tau, 1e-10),
            cs.c2_estimated);
    rep.c_value = std::max(i1, i2);
    rep.slack = rep.c_value * rep.carre_mean - rep.variance;
    return rep;
}

PoincareReport poincare_limit_check(const Scenario& sc, const KFunction& u_real,
                                    double c_infinity, int time_nodes) {
    SpaceTimeMeasure nu = uniform_space_time(sc, time_nodes);
    PoincareReport rep;
    rep.variance = variance_nu(nu, u_real);
    rep.carre_mean = integrate_nu(nu, square_field(sc, u_real, u_real)).real();
    rep.c_value = c_infinity;
    rep.slack = rep.c_value * rep.carre_mean - rep.variance;
    return rep;
}

HarnackReport harnack_check(const Scenario& sc, const KFunction& u_positive,
                            double tau, double t, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y, const ConstantsSpec& cs) {
    if (!cs.c1) throw ConstantsUnavailable("harnack_check needs c1");
    HarnackReport rep;
    rep.rho_value = rho_distance(sc.noise.covariance, x, y);
    auto inv_c1 = [&](double s) {
        return 1.0 / apply_headroom(cs.c1(s), cs.c1_estimated);
    };
    rep.inverse_c1_integral = quad::adaptive(inv_c1, 0.0, tau, 1e-12);
    if (std::isinf(rep.rho_value)) {
        rep.factor = std::numeric_limits<double>::infinity();
        rep.lhs = std::norm(p_tau_point(sc, u_positive, tau, t, x));
        rep.rhs = rep.factor;
        rep.slack = rep.factor;
        return rep;
    }
    rep.factor =
        std::exp(rep.rho_value * rep.rho_value / rep.inverse_c1_integral);
    std::complex<double> pu = p_tau_point(sc, u_positive, tau, t, x);
    std::complex<double> pu2 =
        p_tau_point(sc, u_positive * u_positive, tau, t, y);
    rep.lhs = pu.real() * pu.real();
    rep.rhs = pu2.real() * rep.factor;
    rep.slack = rep.rhs - rep.lhs;
    return rep;
}

EstimateCheckReport gradient_estimate_check(const Scenario& sc,
                                            const KFunction& u_real, double tau,
                                            const std::vector<FdProbe>& probes,
                                            const ConstantsSpec& cs) {
    if (!cs.c1) throw ConstantsUnavailable("gradient_estimate_check needs c1");
    Eigen::MatrixXd sq = matrix_sqrt_psd(sc.noise.covariance);
    KFunction img = apply_P_tau(sc, u_real, tau);
    double c1 = apply_headroom(cs.c1(tau), cs.c1_estimated);
    EstimateCheckReport rep;
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (const FdProbe& p : probes) {
        double lhs = (sq * img.gradient_x(p.t, p.x).real()).norm();
        auto g = [&](const Eigen::VectorXd& z) {
            return (sq * u_real.gradient_x(p.t + tau, z).real()).norm();
        };
        double rhs = std::sqrt(c1) * transition_expectation(sc, p.t, tau, p.x, g);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.min_slack = std::min(rep.min_slack, rhs - lhs);
    }
    return rep;
}

EstimateCheckReport jump_estimate_check(const Scenario& sc,
                                        const KFunction& u_real, double tau,
                                        const std::vector<FdProbe>& probes,
                                        const ConstantsSpec& cs) {
    if (!cs.c2) throw ConstantsUnavailable("jump_estimate_check needs c2");
    KFunction img = apply_P_tau(sc, u_real, tau);
    KFunction gamma_img = square_field_jump(sc, img, img);
    KFunction gamma_u = square_field_jump(sc, u_real, u_real);
    KFunction transported = apply_P_tau(sc, gamma_u, tau);
    double c2 = apply_headroom(cs.c2(tau), cs.c2_estimated);
    EstimateCheckReport rep;
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (const FdProbe& p : probes) {
        double lhs = gamma_img(p.t, p.x).real();
        double rhs = c2 * transported(p.t, p.x).real();
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.min_slack = std::min(rep.min_slack, rhs - lhs);
    }
    return rep;
}

}  // namespace oulevy
