#include "oulevy/solution.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "oulevy/quadrature.hpp"

namespace oulevy {

namespace {

// Ascending segment boundaries of [s,t] cut at t - jT, so each adaptive call
// sees at most one period.
std::vector<double> window_bounds(double s, double t, double T) {
    std::vector<double> b;
    b.push_back(t);
    for (long long j = 1; t - j * T > s + 1e-12; ++j) b.push_back(t - j * T);
    b.push_back(s);
    std::reverse(b.begin(), b.end());
    return b;
}

template <class F>
auto window_integral(double s, double t, double T, F&& f, double tol) {
    std::vector<double> b = window_bounds(s, t, T);
    double seg_tol = tol / (b.size() - 1);
    auto total = quad::adaptive(f, b[0], b[1], seg_tol);
    for (std::size_t i = 1; i + 1 < b.size(); ++i)
        total += quad::adaptive(f, b[i], b[i + 1], seg_tol);
    return total;
}

}  // namespace

Scenario make_scenario(PeriodicCoefficients coeffs, LevyTriple noise,
                       std::uint64_t master_seed, ScenarioTols tols) {
    validate_coefficients(coeffs);
    Scenario sc;
    sc.coefficients = std::move(coeffs);
    sc.noise = validated_triple(std::move(noise));
    if (sc.noise.dim() != sc.coefficients.dimension())
        throw std::invalid_argument("noise dimension does not match coefficients");
    sc.master_seed = master_seed;
    sc.tols = tols;
    sc.family =
        std::make_shared<EvolutionFamily>(sc.coefficients, tols.ode_tol);
    sc.envelope = sc.family->stability_envelope(10.0 * sc.coefficients.period);
    sc.prepared = prepare_noise(sc.noise);
    sc.sup_B = sup_op_norm(sc.coefficients.B);
    sc.sup_f = sup_norm(sc.coefficients.f);
    sc.grad_cap_radius = std::max(1.0, 32.0 * sc.sup_B * sc.envelope.bound);
    sc.grad_cap = symbol_grad_bound(sc, sc.grad_cap_radius);
    return sc;
}

double symbol_grad_bound(const Scenario& sc, double radius) {
    const int d = sc.dim();
    std::vector<Eigen::VectorXd> dirs;
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e(i) = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    if (d > 1) {
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(d) / std::sqrt(double(d));
        Eigen::VectorXd alt(d);
        for (int i = 0; i < d; ++i) alt(i) = (i % 2 == 0 ? 1.0 : -1.0);
        alt /= alt.norm();
        dirs.push_back(ones);
        dirs.push_back(alt);
    }
    double best = 0.0;
    for (int j = 0; j <= 12; ++j) {
        double r = radius * j / 12.0;
        for (const auto& dir : dirs) {
            best = std::max(
                best, levy_symbol_gradient(sc.noise, r * dir, 1e-8).norm());
        }
    }
    return 1.1 * best;
}

long long tail_periods(const Scenario& sc, double amplitude, double rate,
                       double tol) {
    if (!(amplitude > 0.0)) return 1;
    double lhs = std::log(amplitude / (rate * tol));
    if (lhs <= 0.0) return 1;
    long long n =
        1 + static_cast<long long>(std::ceil(lhs / (rate * sc.period())));
    return std::min(n, 200000LL);
}

Eigen::VectorXd drift_convolution(const Scenario& sc, double s, double t) {
    const int d = sc.dim();
    if (sc.sup_f == 0.0) return Eigen::VectorXd::Zero(d);
    if (std::isinf(s)) {
        long long n = tail_periods(sc, sc.envelope.bound * sc.sup_f,
                                   sc.envelope.rate, sc.tols.tail_tol);
        s = t - n * sc.period();
    }
    if (!(t - s > 1e-14)) return Eigen::VectorXd::Zero(d);
    auto f = [&](double r) -> Eigen::VectorXd {
        return sc.family->propagator(t, r) * sc.coefficients.f(r);
    };
    return window_integral(s, t, sc.period(), f, sc.tols.quad_tol);
}

std::complex<double> symbol_time_integral(const Scenario& sc, double s, double t,
                                          const Eigen::VectorXd& h) {
    double hn = h.norm();
    if (hn == 0.0) return {0.0, 0.0};
    if (std::isinf(s)) {
        double rho = sc.sup_B * sc.envelope.bound * hn;
        double gb = rho <= sc.grad_cap_radius ? sc.grad_cap
                                              : symbol_grad_bound(sc, rho);
        long long n = tail_periods(sc, gb * rho, sc.envelope.rate,
                                   sc.tols.tail_tol);
        s = t - n * sc.period();
    }
    if (!(t - s > 1e-14)) return {0.0, 0.0};
    auto f = [&](double r) -> std::complex<double> {
        Eigen::VectorXd v =
            sc.coefficients.B(r).transpose() * sc.family->adjoint(t, r) * h;
        return levy_symbol(sc.noise, v, 0.1 * sc.tols.quad_tol);
    };
    return window_integral(s, t, sc.period(), f, sc.tols.quad_tol);
}

Eigen::VectorXcd symbol_grad_time_integral(const Scenario& sc, double s, double t,
                                           const Eigen::VectorXd& h) {
    if (std::isinf(s)) {
        double rho = sc.sup_B * sc.envelope.bound * std::max(h.norm(), 1e-12);
        double gb = rho <= sc.grad_cap_radius ? sc.grad_cap
                                              : symbol_grad_bound(sc, rho);
        long long n = tail_periods(sc, sc.envelope.bound * sc.sup_B * gb,
                                   sc.envelope.rate, sc.tols.tail_tol);
        s = t - n * sc.period();
    }
    if (!(t - s > 1e-14)) return Eigen::VectorXcd::Zero(sc.dim());
    auto f = [&](double r) -> Eigen::VectorXcd {
        Eigen::MatrixXd UB = sc.family->propagator(t, r) * sc.coefficients.B(r);
        Eigen::VectorXd v = UB.transpose() * h;
        return UB * levy_symbol_gradient(sc.noise, v, 0.1 * sc.tols.quad_tol);
    };
    return window_integral(s, t, sc.period(), f, sc.tols.quad_tol);
}

Eigen::MatrixXd covariance_window(const Scenario& sc, double s, double t) {
    const int d = sc.dim();
    if (sc.noise.covariance.norm() == 0.0) return Eigen::MatrixXd::Zero(d, d);
    if (std::isinf(s)) {
        double amp = sc.envelope.bound * sc.sup_B;
        amp = amp * amp * sc.noise.covariance.norm();
        long long n =
            tail_periods(sc, amp, 2.0 * sc.envelope.rate, sc.tols.tail_tol);
        s = t - n * sc.period();
    }
    if (!(t - s > 1e-14)) return Eigen::MatrixXd::Zero(d, d);
    auto f = [&](double r) -> Eigen::MatrixXd {
        Eigen::MatrixXd UB = sc.family->propagator(t, r) * sc.coefficients.B(r);
        return UB * sc.noise.covariance * UB.transpose();
    };
    return window_integral(s, t, sc.period(), f, sc.tols.quad_tol);
}

std::complex<double> char_fn(const Scenario& sc, double s, double t,
                             const Eigen::VectorXd& x, const Eigen::VectorXd& h) {
    if (std::isinf(s)) throw std::invalid_argument("char_fn needs finite s");
    if (t - s < 0.0) throw std::invalid_argument("char_fn needs s <= t");
    const std::complex<double> I(0.0, 1.0);
    if (t - s < 1e-14) return std::exp(I * h.dot(x));
    Eigen::VectorXd mean = sc.family->propagator(t, s) * x + drift_convolution(sc, s, t);
    return std::exp(I * h.dot(mean) + symbol_time_integral(sc, s, t, h));
}

PathEnsemble simulate_paths(const Scenario& sc, double s, double t,
                            const Eigen::VectorXd& x0, double dt, int n_paths,
                            const SimulateOptions& opts) {
    if (!(t > s)) throw std::invalid_argument("simulate_paths needs s < t");
    if (!(dt > 0.0) || dt > (t - s) / 4.0 * (1.0 + 1e-9))
        throw std::invalid_argument("simulate_paths needs 0 < dt <= (t-s)/4");
    if (n_paths < 1) throw std::invalid_argument("n_paths must be positive");
    if (x0.size() != sc.dim()) throw std::invalid_argument("x0 dimension mismatch");

    const int K = static_cast<int>(std::llround((t - s) / dt));
    const double h = (t - s) / K;
    const int d = sc.dim();

    PathEnsemble ens;
    ens.s = s;
    ens.t = t;
    ens.dt = h;
    ens.x0 = x0;
    ens.grid.resize(K + 1);
    for (int k = 0; k <= K; ++k) ens.grid[k] = s + k * h;
    ens.grid[K] = t;

    // Per-step data shared by all paths.
    std::vector<Eigen::MatrixXd> P(K), B(K);
    std::vector<Eigen::VectorXd> dvec(K);
    const bool has_f = sc.sup_f != 0.0;
    for (int k = 0; k < K; ++k) {
        double a = ens.grid[k], b = ens.grid[k + 1];
        P[k] = sc.family->propagator(b, a);
        B[k] = sc.coefficients.B(a);
        if (has_f) {
            auto g = [&](double r) -> Eigen::VectorXd {
                return sc.family->propagator(b, r) * sc.coefficients.f(r);
            };
            dvec[k] = quad::adaptive(g, a, b, sc.tols.quad_tol * h / (t - s));
        } else {
            dvec[k] = Eigen::VectorXd::Zero(d);
        }
    }
    const bool weak = opts.weak_y.has_value();
    std::vector<Eigen::MatrixXd> A;
    std::vector<Eigen::VectorXd> fvals, Bty;
    Eigen::VectorXd y;
    if (weak) {
        y = *opts.weak_y;
        A.resize(K);
        fvals.resize(K);
        Bty.resize(K);
        for (int k = 0; k < K; ++k) {
            A[k] = sc.coefficients.A(ens.grid[k]);
            fvals[k] = sc.coefficients.f(ens.grid[k]);
            Bty[k] = B[k].transpose() * y;
        }
        ens.weak_y = y;
        ens.weak_residuals.assign(n_paths, 0.0);
    }

    ens.terminal.assign(n_paths, Eigen::VectorXd());
    if (opts.store_paths) {
        ens.stored = true;
        ens.states.assign(n_paths, {});
        ens.increments.assign(n_paths, {});
    }

    auto run_range = [&](int p0, int p1) {
        for (int p = p0; p < p1; ++p) {
            Pcg64 rng(sc.master_seed,
                      stream_id(opts.stream_domain, static_cast<std::uint32_t>(p)));
            Eigen::VectorXd x = x0;
            double acc = 0.0;
            std::vector<Eigen::VectorXd>* st = nullptr;
            std::vector<Eigen::VectorXd>* inc = nullptr;
            if (opts.store_paths) {
                st = &ens.states[p];
                inc = &ens.increments[p];
                st->reserve(K + 1);
                inc->reserve(K);
                st->push_back(x);
            }
            for (int k = 0; k < K; ++k) {
                Eigen::VectorXd dl = sample_increment_prepared(sc.prepared, h, rng);
                if (weak)
                    acc += (y.dot(A[k] * x) + y.dot(fvals[k])) * h + Bty[k].dot(dl);
                x = P[k] * (x + B[k] * dl) + dvec[k];
                if (opts.store_paths) {
                    inc->push_back(dl);
                    st->push_back(x);
                }
            }
            ens.terminal[p] = x;
            if (weak) ens.weak_residuals[p] = y.dot(x) - y.dot(x0) - acc;
        }
    };

    int workers = std::max(1, std::min({opts.workers, n_paths, 64}));
    if (workers == 1) {
        run_range(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(workers);
        int chunk = (n_paths + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            int p0 = w * chunk, p1 = std::min(n_paths, p0 + chunk);
            if (p0 >= p1) break;
            pool.emplace_back([&, w, p0, p1] {
                try {
                    run_range(p0, p1);
                } catch (...) {
                    errs[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }
    return ens;
}

Eigen::VectorXd ensemble_mean(const std::vector<Eigen::VectorXd>& xs) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(xs.at(0).size());
    for (const auto& x : xs) m += x;
    return m / static_cast<double>(xs.size());
}

Eigen::MatrixXd ensemble_covariance(const std::vector<Eigen::VectorXd>& xs) {
    const int d = static_cast<int>(xs.at(0).size());
    Eigen::VectorXd m = ensemble_mean(xs);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    for (const auto& x : xs) {
        Eigen::VectorXd z = x - m;
        c += z * z.transpose();
    }
    return c / static_cast<double>(xs.size() - 1);
}

EmpiricalChar empirical_char(const std::vector<Eigen::VectorXd>& xs,
                             const Eigen::VectorXd& h) {
    const double n = static_cast<double>(xs.size());
    double sr = 0.0, si = 0.0, srr = 0.0, sii = 0.0;
    for (const auto& x : xs) {
        double ph = h.dot(x);
        double c = std::cos(ph), s = std::sin(ph);
        sr += c;
        si += s;
        srr += c * c;
        sii += s * s;
    }
    EmpiricalChar out;
    out.value = {sr / n, si / n};
    double vr = std::max(0.0, (srr - sr * sr / n) / (n - 1.0));
    double vi = std::max(0.0, (sii - si * si / n) / (n - 1.0));
    out.se_real = std::sqrt(vr / n);
    out.se_imag = std::sqrt(vi / n);
    return out;
}

WeakResidualReport weak_residual(const Scenario& sc, const PathEnsemble& ens,
                                 const Eigen::VectorXd& y) {
    if (ens.weak_y && (*ens.weak_y - y).norm() == 0.0 &&
        !ens.weak_residuals.empty())
        return residual_stats(ens.weak_residuals);
    if (!ens.stored)
        throw std::invalid_argument(
            "weak_residual needs stored paths or a matching weak_y accumulation");
    const int K = static_cast<int>(ens.grid.size()) - 1;
    std::vector<Eigen::MatrixXd> A(K);
    std::vector<Eigen::VectorXd> fvals(K), Bty(K);
    for (int k = 0; k < K; ++k) {
        A[k] = sc.coefficients.A(ens.grid[k]);
        fvals[k] = sc.coefficients.f(ens.grid[k]);
        Bty[k] = sc.coefficients.B(ens.grid[k]).transpose() * y;
    }
    std::vector<double> res(ens.states.size());
    for (std::size_t p = 0; p < ens.states.size(); ++p) {
        const auto& st = ens.states[p];
        const auto& inc = ens.increments[p];
        double acc = 0.0;
        for (int k = 0; k < K; ++k)
            acc += (y.dot(A[k] * st[k]) + y.dot(fvals[k])) * ens.dt +
                   Bty[k].dot(inc[k]);
        res[p] = y.dot(st[K]) - y.dot(st[0]) - acc;
    }
    return residual_stats(res);
}

WeakResidualReport residual_stats(const std::vector<double>& residuals) {
    WeakResidualReport r;
    r.n = static_cast<int>(residuals.size());
    r.residuals = residuals;
    double s = 0.0;
    for (double v : residuals) s += v;
    r.mean = s / r.n;
    if (r.n > 1) {
        double ss = 0.0;
        for (double v : residuals) ss += (v - r.mean) * (v - r.mean);
        r.se = std::sqrt(ss / (r.n - 1.0) / r.n);
    }
    return r;
}

}  // namespace oulevy
