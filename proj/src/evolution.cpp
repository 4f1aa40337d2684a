#include "oulevy/evolution.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>
#include <cmath>

namespace oulevy {

namespace {

namespace odeint = boost::numeric::odeint;
using Vec = Eigen::VectorXd;
using Stepper =
    odeint::runge_kutta_dopri5<Vec, double, Vec, double, odeint::vector_space_algebra>;

// Nearest integer if x is within snap of it, otherwise dir<0 ? floor : ceil.
long long snap_index(double x, int dir) {
    double r = std::round(x);
    if (std::abs(x - r) < 1e-9) return static_cast<long long>(r);
    return static_cast<long long>(dir < 0 ? std::floor(x) : std::ceil(x));
}

}  // namespace

void validate_coefficients(const PeriodicCoefficients& c) {
    if (!(c.period > 0.0)) throw std::invalid_argument("period must be positive");
    const int d = c.dimension();
    if (d < 1 || d > 4)
        throw std::invalid_argument("state dimension must be between 1 and 4");
    auto check_mat = [d](const FourierSeries<Eigen::MatrixXd>& s, const char* name) {
        if (s.constant.rows() != d || s.constant.cols() != d)
            throw std::invalid_argument(std::string(name) + ": constant term shape");
        if (s.cos_coeffs.size() != s.sin_coeffs.size())
            throw std::invalid_argument(std::string(name) + ": coefficient count mismatch");
        for (const auto& m : s.cos_coeffs)
            if (m.rows() != d || m.cols() != d)
                throw std::invalid_argument(std::string(name) + ": harmonic shape");
        for (const auto& m : s.sin_coeffs)
            if (m.rows() != d || m.cols() != d)
                throw std::invalid_argument(std::string(name) + ": harmonic shape");
    };
    check_mat(c.A, "A");
    check_mat(c.B, "B");
    if (c.f.constant.size() != d)
        throw std::invalid_argument("f: constant term shape");
    if (c.f.cos_coeffs.size() != c.f.sin_coeffs.size())
        throw std::invalid_argument("f: coefficient count mismatch");
    for (const auto& v : c.f.cos_coeffs)
        if (v.size() != d) throw std::invalid_argument("f: harmonic shape");
    for (const auto& v : c.f.sin_coeffs)
        if (v.size() != d) throw std::invalid_argument("f: harmonic shape");
    if (c.A.period != c.period || c.f.period != c.period || c.B.period != c.period)
        throw std::invalid_argument("coefficient series period mismatch");
}

double op_norm2(const Eigen::MatrixXd& m) {
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

double sup_op_norm(const FourierSeries<Eigen::MatrixXd>& s, int grid) {
    double best = 0.0;
    for (int i = 0; i < grid; ++i)
        best = std::max(best, op_norm2(s(s.period * i / grid)));
    return best;
}

double sup_norm(const FourierSeries<Eigen::VectorXd>& s, int grid) {
    double best = 0.0;
    for (int i = 0; i < grid; ++i)
        best = std::max(best, s(s.period * i / grid).norm());
    return best;
}

EvolutionFamily::EvolutionFamily(PeriodicCoefficients coeffs, double ode_tol, int grid)
    : coeffs_(std::move(coeffs)),
      ode_tol_(ode_tol),
      grid_(grid),
      dim_(coeffs_.dimension()),
      h_(coeffs_.period / grid) {
    validate_coefficients(coeffs_);
    int levels = 1;
    while ((1 << levels) <= grid_) ++levels;
    spans_.resize(levels);
    spans_[0].resize(grid_);
    for (int i = 0; i < grid_; ++i)
        spans_[0][i] = integrate_segment(i * h_, (i + 1) * h_);
    for (int l = 1; l < levels; ++l) {
        int len = 1 << l;
        int count = grid_ - len + 1;
        spans_[l].resize(std::max(count, 0));
        for (int i = 0; i < count; ++i)
            spans_[l][i] = spans_[l - 1][i + len / 2] * spans_[l - 1][i];
    }
    period_pows_.push_back(span(0, grid_));
}

Eigen::MatrixXd EvolutionFamily::integrate_segment(double a, double b) const {
    const int d = dim_;
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    if (!(b - a > 1e-15)) return id;
    Vec u = Eigen::Map<const Vec>(id.data(), d * d);
    auto rhs = [this, d](const Vec& x, Vec& dx, double time) {
        Eigen::Map<const Eigen::MatrixXd> U(x.data(), d, d);
        dx.resize(d * d);
        Eigen::Map<Eigen::MatrixXd>(dx.data(), d, d).noalias() = coeffs_.A(time) * U;
    };
    odeint::integrate_adaptive(odeint::make_controlled<Stepper>(ode_tol_, ode_tol_),
                               rhs, u, a, b, (b - a) / 8.0);
    return Eigen::Map<const Eigen::MatrixXd>(u.data(), d, d);
}

Eigen::MatrixXd EvolutionFamily::span(int i, int j) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(dim_, dim_);
    while (i < j) {
        int l = 0;
        while ((2 << l) <= j - i) ++l;
        out = spans_[l][i] * out;
        i += 1 << l;
    }
    return out;
}

Eigen::MatrixXd EvolutionFamily::period_power(long long q) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(dim_, dim_);
    std::size_t k = 0;
    while (q > 0) {
        if (k >= period_pows_.size())
            period_pows_.push_back(period_pows_.back() * period_pows_.back());
        if (q & 1) out = period_pows_[k] * out;
        q >>= 1;
        ++k;
    }
    return out;
}

Eigen::MatrixXd EvolutionFamily::propagator(double t, double s) const {
    const double T = coeffs_.period;
    if (t < s) {
        if (s - t < 1e-12) return Eigen::MatrixXd::Identity(dim_, dim_);
        throw std::invalid_argument("propagator requires s <= t");
    }
    double k = std::floor(s / T);
    double sr = s - k * T;
    double tr = t - k * T;
    if (sr >= T) {  // floating point pushed sr to T
        sr -= T;
        tr -= T;
    }
    if (tr - sr < 1e-15) return Eigen::MatrixXd::Identity(dim_, dim_);

    long long ia = snap_index(sr / h_, +1);
    double ga = ia * h_;
    if (ga >= tr)  // no cache grid point strictly inside (sr, tr)
        return integrate_segment(sr, tr);

    long long q = snap_index(tr / T, -1);
    double trr = tr - q * T;
    long long ib = snap_index(trr / h_, -1);
    if (ib >= grid_) {
        ib = 0;
        ++q;
        trr -= T;
    }
    double gb = ib * h_;

    Eigen::MatrixXd left = trr - gb > 1e-13 ? integrate_segment(gb, trr)
                                            : Eigen::MatrixXd::Identity(dim_, dim_);
    Eigen::MatrixXd right = ga - sr > 1e-13 ? integrate_segment(sr, ga)
                                            : Eigen::MatrixXd::Identity(dim_, dim_);
    Eigen::MatrixXd mid;
    if (q == 0) {
        mid = span(static_cast<int>(ia), static_cast<int>(ib));
    } else {
        mid = span(0, static_cast<int>(ib)) * period_power(q - 1) *
              span(static_cast<int>(ia), grid_);
    }
    return left * mid * right;
}

StabilityEnvelope EvolutionFamily::stability_envelope(double horizon) const {
    const double T = coeffs_.period;
    const int n_s = 16, n_tau = 160;
    std::vector<double> taus, logs;
    taus.reserve(n_s * n_tau);
    logs.reserve(n_s * n_tau);
    for (int i = 0; i < n_s; ++i) {
        double s = T * i / n_s;
        for (int j = 1; j <= n_tau; ++j) {
            double tau = horizon * j / n_tau;
            taus.push_back(tau);
            logs.push_back(std::log(op_norm2(propagator(s + tau, s))));
        }
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        mx += taus[i];
        my += logs[i];
    }
    mx /= taus.size();
    my /= logs.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        sxx += (taus[i] - mx) * (taus[i] - mx);
        sxy += (taus[i] - mx) * (logs[i] - my);
    }
    double rate = -sxy / sxx;
    if (!(rate > 1e-12)) throw NotExponentiallyStable(rate);
    double bound = 1.0;
    for (std::size_t i = 0; i < taus.size(); ++i)
        bound = std::max(bound, std::exp(logs[i] + rate * taus[i]));
    return {bound, rate};
}

}  // namespace oulevy
