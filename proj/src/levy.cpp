#include "oulevy/levy.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "oulevy/quadrature.hpp"

namespace oulevy {

namespace {

// cos(q) - 1, computed without cancellation.
double cosm1(double q) {
    double s = std::sin(0.5 * q);
    return -2.0 * s * s;
}

// cos(q) - 1 + q^2/2; series for small q, direct otherwise.
double cosm1_plus_half_sq(double q) {
    double q2 = q * q;
    if (std::abs(q) < 0.5) {
        // q^4/24 - q^6/720 + q^8/40320 - q^10/3628800
        return q2 * q2 *
               (1.0 / 24.0 +
                q2 * (-1.0 / 720.0 + q2 * (1.0 / 40320.0 - q2 / 3628800.0)));
    }
    return cosm1(q) + 0.5 * q2;
}

// sin(q) - q; series for small q, direct otherwise.
double sinm(double q) {
    double q2 = q * q;
    if (std::abs(q) < 0.5) {
        return -q * q2 *
               (1.0 / 6.0 +
                q2 * (-1.0 / 120.0 + q2 * (1.0 / 5040.0 - q2 / 362880.0)));
    }
    return std::sin(q) - q;
}

}  // namespace

MeasureValidation validate_measure(const JumpMeasureSpec& spec, int dim) {
    MeasureValidation v;
    if (spec.empty()) {
        v.accepted = true;
        v.message = "no jump component";
        return v;
    }
    if (spec.quadrature_nodes <= 0) {
        v.message = "quadrature_nodes must be positive";
        return v;
    }
    if (const AtomList* al = spec.atoms()) {
        for (const Atom& a : al->atoms) {
            if (a.location.size() != dim) {
                v.message = "atom location dimension mismatch";
                return v;
            }
            if (!(a.intensity > 0.0) || !std::isfinite(a.intensity)) {
                v.message = "atom intensity must be positive and finite";
                return v;
            }
            if (!a.location.allFinite()) {
                v.message = "atom location must be finite";
                return v;
            }
            double n2 = a.location.squaredNorm();
            v.small_square_integral += a.intensity * std::min(1.0, n2);
            if (n2 > 1.0) v.large_first_moment += a.intensity * std::sqrt(n2);
        }
        v.accepted = true;
        v.message = "atom list accepted";
        return v;
    }
    const PowerLawDensity& d = *spec.power_law();
    if (dim != 1) {
        v.message = "power-law density supported in dimension 1 only";
        return v;
    }
    if (!(d.c > 0.0) || !(d.r_max > 0.0)) {
        v.message = "power-law density needs c > 0 and r_max > 0";
        return v;
    }
    if (d.alpha >= 2.0) {
        v.message = "rejected: int min(1,x^2) m(x) dx diverges at 0 for alpha >= 2";
        return v;
    }
    if (!(d.alpha > 0.0)) {
        v.message = "power-law exponent alpha must lie in (0,2)";
        return v;
    }
    double m = std::min(1.0, d.r_max);
    v.small_square_integral = 2.0 * d.c * std::pow(m, 2.0 - d.alpha) / (2.0 - d.alpha);
    if (d.r_max > 1.0) {
        v.small_square_integral +=
            2.0 * d.c * (1.0 - std::pow(d.r_max, -d.alpha)) / d.alpha;
        v.large_first_moment =
            d.alpha == 1.0
                ? 2.0 * d.c * std::log(d.r_max)
                : 2.0 * d.c * (std::pow(d.r_max, 1.0 - d.alpha) - 1.0) / (1.0 - d.alpha);
    }
    v.accepted = true;
    v.message = "power-law density accepted";
    return v;
}

LevyTriple validated_triple(LevyTriple t) {
    const int d = t.dim();
    if (d < 1 || d > 4)
        throw std::invalid_argument("noise dimension must be between 1 and 4");
    if (t.covariance.rows() != d || t.covariance.cols() != d)
        throw std::invalid_argument("covariance shape does not match drift dimension");
    if (!t.drift.allFinite() || !t.covariance.allFinite())
        throw std::invalid_argument("noise characteristics must be finite");
    double scale = 1.0 + t.covariance.norm();
    if ((t.covariance - t.covariance.transpose()).norm() > 1e-12 * scale)
        throw std::invalid_argument("covariance must be symmetric");
    Eigen::MatrixXd sym = 0.5 * (t.covariance + t.covariance.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < d; ++i) {
        if (ev(i) < -1e-12 * scale)
            throw std::invalid_argument("covariance must be positive semidefinite");
        if (ev(i) < 0.0) ev(i) = 0.0;
    }
    t.covariance = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    MeasureValidation mv = validate_measure(t.jumps, d);
    if (!mv.accepted) throw std::invalid_argument("jump measure rejected: " + mv.message);
    return t;
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double power_law_symbol(const PowerLawDensity& d, double v, double tol) {
    double va = std::abs(v);
    if (va == 0.0) return 0.0;
    const double a = d.alpha, rm = d.r_max;
    double delta = std::min(rm, 2.0 / va);
    auto near0 = [&](double x) {
        return cosm1_plus_half_sq(va * x) * std::pow(x, -1.0 - a);
    };
    double i1 = quad::adaptive(near0, 0.0, delta, 0.25 * tol) -
                0.5 * va * va * std::pow(delta, 2.0 - a) / (2.0 - a);
    double i2 = 0.0;
    if (delta < rm) {
        auto tail = [&](double x) { return cosm1(va * x) * std::pow(x, -1.0 - a); };
        i2 = quad::adaptive(tail, delta, rm, 0.25 * tol);
    }
    return 2.0 * d.c * (i1 + i2);
}

double power_law_symbol_grad(const PowerLawDensity& d, double v, double tol) {
    double va = std::abs(v);
    if (va == 0.0) return 0.0;
    const double a = d.alpha, rm = d.r_max;
    double delta = std::min(rm, 2.0 / va);
    auto near0 = [&](double x) { return sinm(va * x) * std::pow(x, -a); };
    double i1 = quad::adaptive(near0, 0.0, delta, 0.25 * tol) +
                va * std::pow(delta, 2.0 - a) / (2.0 - a);
    double i2 = 0.0;
    if (delta < rm) {
        auto tail = [&](double x) { return std::sin(va * x) * std::pow(x, -a); };
        i2 = quad::adaptive(tail, delta, rm, 0.25 * tol);
    }
    double sign = v > 0.0 ? 1.0 : -1.0;
    return -sign * 2.0 * d.c * (i1 + i2);
}

double power_law_pair_symbol(const PowerLawDensity& d, double a, double b, double tol) {
    const double al = d.alpha, rm = d.r_max;
    double s = a + b;
    double vmax = std::max({std::abs(a), std::abs(b), std::abs(s)});
    if (vmax == 0.0) return 0.0;
    double delta = std::min(rm, 2.0 / vmax);
    auto near0 = [&](double x) {
        double g = cosm1_plus_half_sq(s * x) - cosm1_plus_half_sq(a * x) -
                   cosm1_plus_half_sq(b * x);
        return g * std::pow(x, -1.0 - al);
    };
    double i1 = quad::adaptive(near0, 0.0, delta, 0.25 * tol) -
                a * b * std::pow(delta, 2.0 - al) / (2.0 - al);
    double i2 = 0.0;
    if (delta < rm) {
        auto tail = [&](double x) {
            return (cosm1(s * x) - cosm1(a * x) - cosm1(b * x)) *
                   std::pow(x, -1.0 - al);
        };
        i2 = quad::adaptive(tail, delta, rm, 0.25 * tol);
    }
    return 2.0 * d.c * (i1 + i2);
}

std::complex<double> levy_symbol(const LevyTriple& t, const Eigen::VectorXd& u,
                                 double tol) {
    const std::complex<double> I(0.0, 1.0);
    std::complex<double> out = I * t.drift.dot(u) - 0.5 * u.dot(t.covariance * u);
    if (const AtomList* al = t.jumps.atoms()) {
        for (const Atom& a : al->atoms) {
            double phase = a.location.dot(u);
            std::complex<double> term = std::polar(1.0, phase) - 1.0;
            if (a.location.norm() <= 1.0) term -= I * phase;
            out += a.intensity * term;
        }
    } else if (const PowerLawDensity* d = t.jumps.power_law()) {
        out += power_law_symbol(*d, u(0), tol);
    }
    return out;
}

Eigen::VectorXcd levy_symbol_gradient(const LevyTriple& t, const Eigen::VectorXd& u,
                                      double tol) {
    const std::complex<double> I(0.0, 1.0);
    Eigen::VectorXcd out = I * t.drift.cast<std::complex<double>>() -
                           (t.covariance * u).cast<std::complex<double>>();
    if (const AtomList* al = t.jumps.atoms()) {
        for (const Atom& a : al->atoms) {
            double phase = a.location.dot(u);
            std::complex<double> factor = I * std::polar(1.0, phase);
            if (a.location.norm() <= 1.0) factor -= I;
            out += a.intensity * factor * a.location.cast<std::complex<double>>();
        }
    } else if (const PowerLawDensity* d = t.jumps.power_law()) {
        out(0) += power_law_symbol_grad(*d, u(0), tol);
    }
    return out;
}

std::complex<double> jump_pair_symbol(const LevyTriple& t, const Eigen::VectorXd& a,
                                      const Eigen::VectorXd& b, double tol) {
    std::complex<double> out(0.0, 0.0);
    if (const AtomList* al = t.jumps.atoms()) {
        for (const Atom& at : al->atoms) {
            std::complex<double> ea = std::polar(1.0, at.location.dot(a)) - 1.0;
            std::complex<double> eb = std::polar(1.0, at.location.dot(b)) - 1.0;
            out += at.intensity * ea * eb;
        }
    } else if (const PowerLawDensity* d = t.jumps.power_law()) {
        out = power_law_pair_symbol(*d, a(0), b(0), tol);
    }
    return out;
}

PreparedNoise prepare_noise(const LevyTriple& t, double jump_cut) {
    PreparedNoise p;
    p.dim = t.dim();
    p.drift = t.drift;
    if (t.covariance.norm() > 0.0) {
        p.has_gauss = true;
        p.sqrt_cov = matrix_sqrt_psd(t.covariance);
    }
    if (const AtomList* al = t.jumps.atoms()) {
        for (const Atom& a : al->atoms)
            p.atoms.push_back({a.location, a.intensity, a.location.norm() <= 1.0});
    } else if (const PowerLawDensity* d = t.jumps.power_law()) {
        double eps = std::min(jump_cut, 0.5 * d->r_max);
        p.has_power_law = true;
        p.pl_alpha = d->alpha;
        p.pl_inv_a = std::pow(eps, -d->alpha);
        p.pl_inv_b = std::pow(d->r_max, -d->alpha);
        p.pl_rate = 2.0 * d->c * (p.pl_inv_a - p.pl_inv_b) / d->alpha;
        p.dropped_variance =
            2.0 * d->c * std::pow(eps, 2.0 - d->alpha) / (2.0 - d->alpha);
    }
    return p;
}

Eigen::VectorXd sample_increment_prepared(const PreparedNoise& p, double dt,
                                          Pcg64& rng) {
    Eigen::VectorXd dl = p.drift * dt;
    if (p.has_gauss) {
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd z(p.dim);
        for (int i = 0; i < p.dim; ++i) z(i) = normal(rng);
        dl += std::sqrt(dt) * (p.sqrt_cov * z);
    }
    for (const PreparedNoise::PAtom& a : p.atoms) {
        std::poisson_distribution<long> pois(a.rate * dt);
        long n = pois(rng);
        if (n > 0) dl += static_cast<double>(n) * a.x;
        if (a.inside_unit_ball) dl -= a.rate * dt * a.x;
    }
    if (p.has_power_law) {
        std::poisson_distribution<long> pois(p.pl_rate * dt);
        long n = pois(rng);
        for (long k = 0; k < n; ++k) {
            double v = rng.uniform01();
            double mag = std::pow(p.pl_inv_a - v * (p.pl_inv_a - p.pl_inv_b),
                                  -1.0 / p.pl_alpha);
            double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
            dl(0) += sign * mag;
        }
    }
    return dl;
}

Eigen::VectorXd sample_increment(const LevyTriple& t, double dt, Pcg64& rng) {
    PreparedNoise p = prepare_noise(t);
    return sample_increment_prepared(p, dt, rng);
}

}  // namespace oulevy
