#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oulevy::quad {

// Nodes/weights of an n-point Gaussian rule, via the symmetric tridiagonal
// Jacobi-matrix eigenproblem (Golub-Welsch).  Returned nodes are ascending.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Legendre rule on [-1,1]; integrates polynomials up to degree 2n-1 exactly.
inline Rule gauss_legendre(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        r.weights[i] = 2.0 * v0 * v0;
    }
    return r;
}

// Hermite rule for weight exp(-x^2) on R; weights sum to sqrt(pi).
inline Rule gauss_hermite(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = std::sqrt(k / 2.0);
        J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double sqrt_pi = std::sqrt(M_PI);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        r.weights[i] = sqrt_pi * v0 * v0;
    }
    return r;
}

inline const Rule& legendre7() {
    static const Rule r = gauss_legendre(7);
    return r;
}
inline const Rule& legendre15() {
    static const Rule r = gauss_legendre(15);
    return r;
}
inline const Rule& legendre64() {
    static const Rule r = gauss_legendre(64);
    return r;
}
inline const Rule& hermite64() {
    static const Rule r = gauss_hermite(64);
    return r;
}

inline double value_norm(double v) { return std::abs(v); }
inline double value_norm(const std::complex<double>& v) { return std::abs(v); }
template <class Derived>
double value_norm(const Eigen::MatrixBase<Derived>& v) {
    return v.norm();
}

template <class F>
auto fixed_rule(F&& f, double a, double b, const Rule& rule) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    auto acc = f(c + h * rule.nodes[0]);
    acc *= rule.weights[0];
    for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
        auto v = f(c + h * rule.nodes[i]);
        v *= rule.weights[i];
        acc += v;
    }
    acc *= h;
    return acc;
}

namespace detail {

template <class F, class T>
void adaptive_rec(F& f, double a, double b, double tol, int depth, T& total,
                  int& fevals, int max_fevals) {
    T coarse = fixed_rule(f, a, b, legendre7());
    T fine = fixed_rule(f, a, b, legendre15());
    fevals += 22;
    if (fevals > max_fevals)
        throw std::runtime_error("adaptive quadrature: evaluation budget exhausted");
    double err = value_norm(T(fine - coarse));
    if (err <= tol || depth >= 48) {
        total += fine;
        return;
    }
    double m = 0.5 * (a + b);
    adaptive_rec(f, a, m, 0.5 * tol, depth + 1, total, fevals, max_fevals);
    adaptive_rec(f, m, b, 0.5 * tol, depth + 1, total, fevals, max_fevals);
}

}  // namespace detail

// Adaptive integration of f over [a,b] to absolute tolerance tol.  The value
// type follows f's return type: double, complex, or any Eigen vector/matrix.
template <class F>
auto adaptive(F&& f, double a, double b, double tol, int max_fevals = 2'000'000) {
    using T = std::decay_t<decltype(f(a))>;
    // Seed the accumulator from the midpoint: endpoints may be integrable
    // singularities (the Gauss nodes themselves never touch them).
    T total = f(0.5 * (a + b));
    total *= 0.0;
    if (!(b > a)) return total;
    int fevals = 0;
    detail::adaptive_rec(f, a, b, tol, 0, total, fevals, max_fevals);
    return total;
}

// Adaptive integration with the interval pre-split at the given interior
// points (used when the integrand has kinks or jumps at known locations).
template <class F>
auto adaptive_split(F&& f, double a, double b, const std::vector<double>& cuts,
                    double tol) {
    std::vector<double> pts;
    pts.push_back(a);
    for (double c : cuts)
        if (c > a + 1e-14 && c < b - 1e-14) pts.push_back(c);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    auto total = adaptive(f, pts[0], pts[1], tol / (pts.size() - 1));
    for (std::size_t i = 1; i + 1 < pts.size(); ++i)
        total += adaptive(f, pts[i], pts[i + 1], tol / (pts.size() - 1));
    return total;
}

// Sign changes of g on [a,b], located by uniform scan plus bisection.
inline std::vector<double> find_crossings(const std::function<double(double)>& g,
                                          double a, double b, int scan_points = 512) {
    std::vector<double> roots;
    if (!(b > a)) return roots;
    double h = (b - a) / scan_points;
    double x0 = a, g0 = g(a);
    for (int i = 1; i <= scan_points; ++i) {
        double x1 = a + i * h, g1 = g(x1);
        if (g0 == 0.0) roots.push_back(x0);
        if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0)) {
            double lo = x0, hi = x1, glo = g0;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi), gm = g(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((glo < 0.0) == (gm < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        g0 = g1;
    }
    return roots;
}

}  // namespace oulevy::quad
