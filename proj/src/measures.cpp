#include "oulevy/measures.hpp"

#include <algorithm>
#include <cmath>

#include "oulevy/quadrature.hpp"

namespace oulevy {

namespace {

constexpr double kBigAge = 1e18;

// Mapped jump location at age a: psi(a) = U(t,t-a) B(t-a) x.
class AgePath {
  public:
    AgePath(const Scenario& sc, double t, Eigen::VectorXd x)
        : sc_(&sc), t_(t), x_(std::move(x)) {}
    Eigen::VectorXd operator()(double a) const {
        return sc_->family->propagator(t_, t_ - a) *
               (sc_->coefficients.B(t_ - a) * x_);
    }

  private:
    const Scenario* sc_;
    double t_;
    Eigen::VectorXd x_;
};

// Scalar factor u(a) = U(t,t-a) B(t-a) in dimension 1 (signed).
class AgeScale {
  public:
    AgeScale(const Scenario& sc, double t) : sc_(&sc), t_(t) {}
    double operator()(double a) const {
        return sc_->family->propagator(t_, t_ - a)(0, 0) *
               sc_->coefficients.B(t_ - a)(0, 0);
    }

  private:
    const Scenario* sc_;
    double t_;
};

std::vector<double> cell_bounds(double lo, double hi,
                                const std::vector<double>& crossings) {
    std::vector<double> b;
    b.push_back(lo);
    for (double c : crossings)
        if (c > lo + 1e-13 && c < hi - 1e-13) b.push_back(c);
    b.push_back(hi);
    std::sort(b.begin(), b.end());
    return b;
}

// Integral of f over the cells of [lo,hi] where cond holds at the midpoint;
// the crossings are the cond boundary locations.
template <class F, class Cond>
auto integral_where(F&& f, Cond&& cond, double lo, double hi,
                    const std::vector<double>& crossings, double tol) {
    std::vector<double> b = cell_bounds(lo, hi, crossings);
    auto total = f(lo);
    total *= 0.0;
    double cell_tol = tol / (b.size() - 1);
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        if (!cond(0.5 * (b[i] + b[i + 1]))) continue;
        total += quad::adaptive(f, b[i], b[i + 1], cell_tol);
    }
    return total;
}

int scan_points(const Scenario& sc, double range) {
    int per_period = std::max(64, sc.noise.jumps.quadrature_nodes);
    double periods = std::max(1.0, std::ceil(range / sc.period()));
    return static_cast<int>(std::min(4e5, 4.0 * per_period * periods));
}

// Gauss-Legendre nodes of `count` points per period chunk over ages [0,amax].
std::vector<std::pair<double, double>> age_nodes(const Scenario& sc, double amax,
                                                 int count) {
    const quad::Rule rule = quad::gauss_legendre(count);
    std::vector<std::pair<double, double>> out;
    double T = sc.period();
    for (double lo = 0.0; lo < amax - 1e-13; lo += T) {
        double hi = std::min(lo + T, amax);
        double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int q = 0; q < count; ++q)
            out.emplace_back(c + h * rule.nodes[q], h * rule.weights[q]);
    }
    return out;
}

struct LawBuild {
    IDLaw law;
    const Scenario* sc;
    double s, t, amax_window;  // amax_window = t-s (kBigAge for limit laws)
    long long max_periods = 1;
    double tail = 0.0;

    void note(long long n, double bound) {
        max_periods = std::max(max_periods, n);
        tail += bound;
    }
};

void add_atom_jumps(LawBuild& b) {
    const Scenario& sc = *b.sc;
    const AtomList* al = sc.noise.jumps.atoms();
    if (!al) return;
    const double M = sc.envelope.bound, w = sc.envelope.rate, T = sc.period();
    const double tol = sc.tols.tail_tol;
    JumpAtomCloud cloud;
    Eigen::VectorXd corr = Eigen::VectorXd::Zero(sc.dim());
    for (const Atom& atom : al->atoms) {
        AgePath psi(sc, b.t, atom.location);
        const double xn = atom.location.norm();
        const double reach = M * sc.sup_B * xn;  // ||psi(a)|| <= reach e^{-wa}
        // Ages with ||psi|| possibly above 1.
        double a_unit = reach > 1.0 ? std::log(reach) / w : 0.0;
        a_unit = std::min(a_unit, b.amax_window);
        std::vector<double> crossings;
        if (a_unit > 0.0) {
            auto g = [&](double a) { return psi(a).norm() - 1.0; };
            crossings = quad::find_crossings(g, 0.0, a_unit,
                                             scan_points(sc, a_unit));
        }
        auto above = [&](double a) { return psi(a).norm() > 1.0; };
        auto below = [&](double a) { return psi(a).norm() <= 1.0; };
        if (a_unit > 0.0) {
            auto one = [](double) { return 1.0; };
            b.law.jump_mass_above_unit +=
                atom.intensity *
                integral_where(one, above, 0.0, a_unit, crossings, 1e-13);
        }
        // min(1,|psi|^2): tail beyond N_sq periods below tolerance.
        long long n_sq = tail_periods(sc, atom.intensity * reach * reach,
                                      2.0 * w, 0.25 * tol);
        double a_sq = std::min(b.amax_window, n_sq * T);
        auto sq = [&](double a) { return std::min(1.0, psi(a).squaredNorm()); };
        b.law.jump_small_square +=
            atom.intensity * quad::adaptive_split(sq, 0.0, a_sq, crossings,
                                                  0.25 * tol / atom.intensity);
        b.note(n_sq, atom.intensity * reach * reach *
                         std::exp(-2.0 * w * a_sq) / (2.0 * w));
        // Indicator mismatch in the mean.
        if (xn <= 1.0) {
            if (a_unit > 0.0) {
                auto vec = [&](double a) -> Eigen::VectorXd { return psi(a); };
                corr -= atom.intensity * integral_where(vec, above, 0.0, a_unit,
                                                        crossings, 0.25 * tol);
            }
        } else {
            long long n_m = tail_periods(sc, atom.intensity * reach, w, 0.25 * tol);
            double a_m = std::min(b.amax_window, n_m * T);
            auto vec = [&](double a) -> Eigen::VectorXd { return psi(a); };
            corr += atom.intensity *
                    integral_where(vec, below, 0.0, a_m, crossings, 0.25 * tol);
            b.note(n_m, atom.intensity * reach * std::exp(-w * a_m) / w);
        }
        // Discretized cloud on the same truncated age range.
        double a_cloud = std::min(b.amax_window, std::max(a_sq, 1.0 * T));
        for (auto [a, wt] : age_nodes(sc, a_cloud, sc.noise.jumps.quadrature_nodes))
            cloud.atoms.push_back({psi(a), wt * atom.intensity});
    }
    b.law.mean += corr;
    b.law.jumps = std::move(cloud);
}

void add_density_jumps(LawBuild& b) {
    const Scenario& sc = *b.sc;
    const PowerLawDensity* pd = sc.noise.jumps.power_law();
    if (!pd) return;
    const double M = sc.envelope.bound, w = sc.envelope.rate, T = sc.period();
    const double tol = sc.tols.tail_tol;
    const double c = pd->c, al = pd->alpha, rm = pd->r_max;
    AgeScale u(sc, b.t);
    const double reach = M * sc.sup_B;  // |u(a)| <= reach e^{-wa}

    // Mass above 1 under scale sv: present only while |u| rm > 1.
    auto mass_above = [&](double sv) {
        if (sv * rm <= 1.0) return 0.0;
        return 2.0 * c * (std::pow(sv, al) - std::pow(rm, -al)) / al;
    };
    auto small_sq = [&](double sv) {
        if (sv <= 0.0) return 0.0;
        double xs = std::min(rm, 1.0 / sv);
        double v = sv * sv * std::pow(xs, 2.0 - al) / (2.0 - al);
        if (sv * rm > 1.0) v += (std::pow(xs, -al) - std::pow(rm, -al)) / al;
        return 2.0 * c * v;
    };

    double a_unit = reach * rm > 1.0 ? std::log(reach * rm) / w : 0.0;
    a_unit = std::min(a_unit, b.amax_window);
    std::vector<double> crossings;
    if (a_unit > 0.0) {
        auto g = [&](double a) { return std::abs(u(a)) * rm - 1.0; };
        crossings = quad::find_crossings(g, 0.0, a_unit, scan_points(sc, a_unit));
        auto f = [&](double a) { return mass_above(std::abs(u(a))); };
        b.law.jump_mass_above_unit =
            quad::adaptive_split(f, 0.0, a_unit, crossings, 1e-13);
    }

    double sq_amp = 2.0 * c * std::pow(rm, 2.0 - al) / (2.0 - al) * reach * reach;
    long long n_sq = tail_periods(sc, sq_amp, 2.0 * w, 0.25 * tol);
    double a_sq = std::min(b.amax_window, n_sq * T);
    auto fsq = [&](double a) { return small_sq(std::abs(u(a))); };
    b.law.jump_small_square =
        quad::adaptive_split(fsq, 0.0, a_sq, crossings, 0.25 * tol);
    b.note(n_sq, sq_amp * std::exp(-2.0 * w * a_sq) / (2.0 * w));

    JumpDensitySlices slices;
    slices.base = *pd;
    for (auto [a, wt] : age_nodes(sc, a_sq, sc.noise.jumps.quadrature_nodes))
        slices.scale_weight.emplace_back(std::abs(u(a)), wt);
    b.law.jumps = std::move(slices);
}

IDLaw build_law(const Scenario& sc, double s, double t) {
    LawBuild b;
    b.sc = &sc;
    b.s = s;
    b.t = t;
    b.amax_window = std::isinf(s) ? kBigAge : t - s;
    b.law.window_start = s;
    b.law.t = t;
    b.law.mean = drift_convolution(sc, s, t);
    b.law.covariance = covariance_window(sc, s, t);
    if (sc.noise.covariance.norm() > 0.0) {
        long long n = tail_periods(
            sc,
            std::pow(sc.envelope.bound * sc.sup_B, 2) * sc.noise.covariance.norm(),
            2.0 * sc.envelope.rate, sc.tols.tail_tol);
        b.note(n, sc.tols.tail_tol);
    }
    if (sc.sup_f > 0.0)
        b.note(tail_periods(sc, sc.envelope.bound * sc.sup_f, sc.envelope.rate,
                            sc.tols.tail_tol),
               sc.tols.tail_tol);
    double bn = sc.noise.drift.norm();
    if (bn > 0.0) {
        double lo = s;
        if (std::isinf(s)) {
            long long n = tail_periods(sc, sc.envelope.bound * sc.sup_B * bn,
                                       sc.envelope.rate, sc.tols.tail_tol);
            lo = t - n * sc.period();
            b.note(n, sc.tols.tail_tol);
        }
        auto f = [&](double r) -> Eigen::VectorXd {
            return sc.family->propagator(t, r) *
                   (sc.coefficients.B(r) * sc.noise.drift);
        };
        b.law.mean += quad::adaptive_split(f, lo, t, {}, sc.tols.quad_tol);
    }
    add_atom_jumps(b);
    add_density_jumps(b);
    b.law.truncation_periods = b.max_periods;
    b.law.tail_bound = b.tail;
    return b.law;
}

}  // namespace

IDLaw limit_law(const Scenario& sc, double t) {
    return build_law(sc, neg_infinity(), t);
}

IDLaw window_law(const Scenario& sc, double s, double t) {
    if (std::isinf(s) || !(t >= s))
        throw std::invalid_argument("window_law needs finite s <= t");
    return build_law(sc, s, t);
}

std::complex<double> esm_char_fn(const Scenario& sc, double t,
                                 const Eigen::VectorXd& h) {
    const std::complex<double> I(0.0, 1.0);
    Eigen::VectorXd F = drift_convolution(sc, neg_infinity(), t);
    return std::exp(I * h.dot(F) + symbol_time_integral(sc, neg_infinity(), t, h));
}

EsmCharGrad esm_char_grad(const Scenario& sc, double t, const Eigen::VectorXd& h) {
    const std::complex<double> I(0.0, 1.0);
    Eigen::VectorXd F = drift_convolution(sc, neg_infinity(), t);
    EsmCharGrad out;
    out.value =
        std::exp(I * h.dot(F) + symbol_time_integral(sc, neg_infinity(), t, h));
    out.grad_log = I * F.cast<std::complex<double>>() +
                   symbol_grad_time_integral(sc, neg_infinity(), t, h);
    return out;
}

std::complex<double> law_char_exponent(const Scenario& sc, const IDLaw& law,
                                       const Eigen::VectorXd& h) {
    const std::complex<double> I(0.0, 1.0);
    const double t = law.t;
    const double amax_window =
        std::isinf(law.window_start) ? kBigAge : t - law.window_start;
    std::complex<double> out =
        I * h.dot(law.mean) - 0.5 * h.dot(law.covariance * h);
    const double M = sc.envelope.bound, w = sc.envelope.rate, T = sc.period();
    if (const AtomList* al = sc.noise.jumps.atoms()) {
        for (const Atom& atom : al->atoms) {
            AgePath psi(sc, t, atom.location);
            double reach = M * sc.sup_B * atom.location.norm();
            double a_unit = reach > 1.0 ? std::log(reach) / w : 0.0;
            a_unit = std::min(a_unit, amax_window);
            std::vector<double> crossings;
            if (a_unit > 0.0) {
                auto g = [&](double a) { return psi(a).norm() - 1.0; };
                crossings =
                    quad::find_crossings(g, 0.0, a_unit, scan_points(sc, a_unit));
            }
            double amp = atom.intensity *
                         std::pow(reach * std::max(h.norm(), 1e-12), 2);
            long long n = tail_periods(sc, amp, 2.0 * w, 0.25 * sc.tols.tail_tol);
            double amax = std::min(amax_window, n * T);
            auto f = [&](double a) -> std::complex<double> {
                Eigen::VectorXd y = psi(a);
                double ph = y.dot(h);
                std::complex<double> v = std::polar(1.0, ph) - 1.0;
                if (y.norm() <= 1.0) v -= I * ph;
                return v;
            };
            out += atom.intensity *
                   quad::adaptive_split(f, 0.0, amax, crossings,
                                        0.25 * sc.tols.tail_tol);
        }
    } else if (const PowerLawDensity* pd = sc.noise.jumps.power_law()) {
        AgeScale u(sc, t);
        double reach = M * sc.sup_B;
        double h0 = h(0);
        double amp = pd->c * std::pow(pd->r_max, 2.0 - pd->alpha) /
                     (2.0 - pd->alpha) * std::pow(reach * std::abs(h0), 2);
        long long n = tail_periods(sc, amp, 2.0 * w, 0.25 * sc.tols.tail_tol);
        double amax = std::min(amax_window, n * T);
        auto f = [&](double a) {
            return power_law_symbol(*pd, u(a) * h0, 0.01 * sc.tols.quad_tol);
        };
        out += quad::adaptive_split(f, 0.0, amax, {}, 0.25 * sc.tols.tail_tol);
    }
    return out;
}

std::complex<double> continuous_log_esm(const Scenario& sc, double t,
                                        const Eigen::VectorXd& h, int steps) {
    for (; steps <= 4096; steps *= 2) {
        std::complex<double> prev(1.0, 0.0);
        double arg_total = 0.0;
        double mod_final = 0.0;
        bool ok = true;
        for (int j = 1; j <= steps; ++j) {
            std::complex<double> cur =
                esm_char_fn(sc, t, (static_cast<double>(j) / steps) * h);
            double da = std::arg(cur / prev);
            if (std::abs(da) > 1.5) {
                ok = false;
                break;
            }
            arg_total += da;
            prev = cur;
            if (j == steps) mod_final = std::abs(cur);
        }
        if (ok) return {std::log(mod_final), arg_total};
    }
    throw std::runtime_error("continuous_log_esm: phase steps too large");
}

InvarianceReport check_invariance(const Scenario& sc, double s, double t,
                                  const std::vector<Eigen::VectorXd>& probes) {
    const std::complex<double> I(0.0, 1.0);
    InvarianceReport rep;
    Eigen::VectorXd F = drift_convolution(sc, s, t);
    for (const auto& h : probes) {
        std::complex<double> lhs =
            esm_char_fn(sc, s, sc.family->adjoint(t, s) * h) *
            std::exp(I * h.dot(F) + symbol_time_integral(sc, s, t, h));
        std::complex<double> rhs = esm_char_fn(sc, t, h);
        rep.defects.push_back(std::abs(lhs - rhs));
        rep.max_defect = std::max(rep.max_defect, rep.defects.back());
    }
    return rep;
}

std::complex<double> uniqueness_iteration(const Scenario& sc, double t,
                                          const Eigen::VectorXd& h, int iters) {
    const std::complex<double> I(0.0, 1.0);
    const double T = sc.period();
    Eigen::MatrixXd Mstar = sc.family->adjoint(t, t - T);
    Eigen::VectorXd F1 = drift_convolution(sc, t - T, t);
    double growth_const = sup_norm(sc.coefficients.f) + 1.0 +
                          sc.grad_cap * sc.sup_B * sc.envelope.bound /
                              sc.envelope.rate;
    double k_tol = sc.tols.tail_tol / growth_const;
    std::complex<double> acc(1.0, 0.0);
    Eigen::VectorXd k = h;
    for (int j = 0; j < (iters > 0 ? iters : 2000); ++j) {
        if (iters == 0 && k.norm() <= k_tol) break;
        acc *= std::exp(I * k.dot(F1) + symbol_time_integral(sc, t - T, t, k));
        k = Mstar * k;
    }
    return acc;
}

std::vector<Eigen::VectorXd> sample_nu(const Scenario& sc, double t, int n_paths,
                                       double dt, int burn_periods,
                                       const SimulateOptions& opts) {
    const double T = sc.period();
    if (burn_periods <= 0) {
        double need = (std::log(std::max(sc.envelope.bound, 1.0)) + 12.0) /
                      (sc.envelope.rate * T);
        burn_periods = std::max(5, static_cast<int>(std::ceil(need)));
    }
    double s = t - burn_periods * T;
    PathEnsemble ens =
        simulate_paths(sc, s, t, Eigen::VectorXd::Zero(sc.dim()), dt, n_paths, opts);
    return ens.terminal;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double F = cdf(samples[i]);
        d = std::max(d, std::max(F - i / n, (i + 1) / n - F));
    }
    return d;
}

double ks_critical(double alpha, int n) {
    return std::sqrt(-std::log(alpha / 2.0) / (2.0 * n));
}

double normal_cdf(double x, double mean, double variance) {
    return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

}  // namespace oulevy
