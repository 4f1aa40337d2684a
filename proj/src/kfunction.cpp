#include "oulevy/kfunction.hpp"

#include <map>
#include <memory>

namespace oulevy {

PeriodicScalarFn scalar_const_fn(std::complex<double> c) {
    PeriodicScalarFn f;
    f.value = [c](double) { return c; };
    f.deriv = [](double) { return std::complex<double>(0.0, 0.0); };
    return f;
}

PeriodicScalarFn scalar_fourier_fn(FourierSeries<std::complex<double>> s) {
    PeriodicScalarFn f;
    auto sp = std::make_shared<FourierSeries<std::complex<double>>>(std::move(s));
    f.value = [sp](double t) { return (*sp)(t); };
    f.deriv = [sp](double t) { return sp->derivative(t); };
    return f;
}

PeriodicVectorFn vector_const_fn(Eigen::VectorXd v) {
    PeriodicVectorFn f;
    f.constant = v;
    f.value = [v](double) { return v; };
    return f;
}

PeriodicVectorFn vector_fourier_fn(FourierSeries<Eigen::VectorXd> s) {
    if (s.is_constant()) return vector_const_fn(s.constant);
    PeriodicVectorFn f;
    auto sp = std::make_shared<FourierSeries<Eigen::VectorXd>>(std::move(s));
    f.value = [sp](double t) { return (*sp)(t); };
    f.deriv = [sp](double t) { return sp->derivative(t); };
    return f;
}

KFunction KFunction::term(int dim, double period, PeriodicScalarFn phi,
                          PeriodicVectorFn h) {
    KFunction u(dim, period);
    u.add_term({std::move(phi), std::move(h)});
    return u;
}

KFunction KFunction::exponential(double period, std::complex<double> phi0,
                                 Eigen::VectorXd h) {
    const int d = static_cast<int>(h.size());
    return term(d, period, scalar_const_fn(phi0), vector_const_fn(std::move(h)));
}

KFunction KFunction::constant(int dim, double period, std::complex<double> c) {
    return term(dim, period, scalar_const_fn(c),
                vector_const_fn(Eigen::VectorXd::Zero(dim)));
}

KFunction KFunction::fourier(double period, FourierSeries<std::complex<double>> phi,
                             FourierSeries<Eigen::VectorXd> h) {
    const int d = static_cast<int>(h.constant.size());
    return term(d, period, scalar_fourier_fn(std::move(phi)),
                vector_fourier_fn(std::move(h)));
}

std::complex<double> KFunction::operator()(double t, const Eigen::VectorXd& x) const {
    std::complex<double> out(0.0, 0.0);
    for (const KTerm& term : terms_)
        out += term.phi.value(t) * std::polar(1.0, x.dot(term.h.value(t)));
    return out;
}

Eigen::VectorXcd KFunction::gradient_x(double t, const Eigen::VectorXd& x) const {
    const std::complex<double> I(0.0, 1.0);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim_);
    for (const KTerm& term : terms_) {
        Eigen::VectorXd h = term.h.value(t);
        out += (I * term.phi.value(t) * std::polar(1.0, x.dot(h))) *
               h.cast<std::complex<double>>();
    }
    return out;
}

bool KFunction::differentiable() const {
    for (const KTerm& term : terms_)
        if (!term.phi.deriv || !term.h.differentiable()) return false;
    return true;
}

KFunction KFunction::operator+(const KFunction& o) const {
    KFunction out = *this;
    for (const KTerm& term : o.terms_) out.add_term(term);
    return out;
}

KFunction KFunction::operator*(const KFunction& o) const {
    KFunction out(dim_, period_);
    for (const KTerm& a : terms_) {
        for (const KTerm& b : o.terms_) {
            KTerm p;
            auto av = a.phi.value, bv = b.phi.value;
            p.phi.value = [av, bv](double t) { return av(t) * bv(t); };
            if (a.phi.deriv && b.phi.deriv) {
                auto ad = a.phi.deriv, bd = b.phi.deriv;
                p.phi.deriv = [av, bv, ad, bd](double t) {
                    return ad(t) * bv(t) + av(t) * bd(t);
                };
            }
            if (a.h.constant && b.h.constant) {
                p.h = vector_const_fn(*a.h.constant + *b.h.constant);
            } else {
                auto ahv = a.h.value, bhv = b.h.value;
                p.h.value = [ahv, bhv](double t) -> Eigen::VectorXd {
                    return ahv(t) + bhv(t);
                };
                if (a.h.differentiable() && b.h.differentiable()) {
                    auto ah = a.h, bh = b.h;
                    p.h.deriv = [ah, bh](double t) -> Eigen::VectorXd {
                        return ah.derivative(t) + bh.derivative(t);
                    };
                }
            }
            out.add_term(std::move(p));
        }
    }
    return out;
}

KFunction KFunction::scaled(std::complex<double> c) const {
    KFunction out(dim_, period_);
    for (const KTerm& term : terms_) {
        KTerm s = term;
        auto v = term.phi.value;
        s.phi.value = [v, c](double t) { return c * v(t); };
        if (term.phi.deriv) {
            auto dv = term.phi.deriv;
            s.phi.deriv = [dv, c](double t) { return c * dv(t); };
        }
        out.add_term(std::move(s));
    }
    return out;
}

KFunction KFunction::modulated(PeriodicScalarFn theta) const {
    KFunction out(dim_, period_);
    for (const KTerm& term : terms_) {
        KTerm s = term;
        auto v = term.phi.value, tv = theta.value;
        s.phi.value = [v, tv](double t) { return tv(t) * v(t); };
        if (term.phi.deriv && theta.deriv) {
            auto dv = term.phi.deriv, td = theta.deriv;
            s.phi.deriv = [v, tv, dv, td](double t) {
                return td(t) * v(t) + tv(t) * dv(t);
            };
        } else {
            s.phi.deriv = nullptr;
        }
        out.add_term(std::move(s));
    }
    return out;
}

KFunction KFunction::conjugated() const {
    KFunction out(dim_, period_);
    for (const KTerm& term : terms_) {
        KTerm s;
        auto v = term.phi.value;
        s.phi.value = [v](double t) { return std::conj(v(t)); };
        if (term.phi.deriv) {
            auto dv = term.phi.deriv;
            s.phi.deriv = [dv](double t) { return std::conj(dv(t)); };
        }
        if (term.h.constant) {
            s.h = vector_const_fn(-*term.h.constant);
        } else {
            auto hv = term.h.value;
            s.h.value = [hv](double t) -> Eigen::VectorXd { return -hv(t); };
            if (term.h.deriv) {
                auto hd = term.h.deriv;
                s.h.deriv = [hd](double t) -> Eigen::VectorXd { return -hd(t); };
            }
        }
        out.add_term(std::move(s));
    }
    return out;
}

KFunction KFunction::real_part() const {
    return (*this + conjugated()).scaled(0.5);
}

KFunction KFunction::simplified() const {
    KFunction out(dim_, period_);
    std::map<std::vector<double>, std::vector<const KTerm*>> groups;
    for (const KTerm& term : terms_) {
        if (!term.h.constant) {
            out.add_term(term);
            continue;
        }
        std::vector<double> key(term.h.constant->data(),
                                term.h.constant->data() + term.h.constant->size());
        groups[key].push_back(&term);
    }
    for (auto& [key, ts] : groups) {
        if (ts.size() == 1) {
            out.add_term(*ts[0]);
            continue;
        }
        KTerm m;
        m.h = ts[0]->h;
        std::vector<std::function<std::complex<double>(double)>> vals, ders;
        bool have_der = true;
        for (const KTerm* t : ts) {
            vals.push_back(t->phi.value);
            if (t->phi.deriv)
                ders.push_back(t->phi.deriv);
            else
                have_der = false;
        }
        m.phi.value = [vals](double t) {
            std::complex<double> s(0.0, 0.0);
            for (const auto& v : vals) s += v(t);
            return s;
        };
        if (have_der) {
            m.phi.deriv = [ders](double t) {
                std::complex<double> s(0.0, 0.0);
                for (const auto& v : ders) s += v(t);
                return s;
            };
        }
        out.add_term(std::move(m));
    }
    return out;
}

}  // namespace oulevy
