#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

namespace oulevy {

// Finite real Fourier series with period T:
//   g(t) = c0 + sum_k [ a_k cos(2 pi k t / T) + b_k sin(2 pi k t / T) ].
// The coefficient type M may be double, std::complex<double>, Eigen::VectorXd,
// or Eigen::MatrixXd; the series is evaluated exactly (no truncation error).
template <class M>
struct FourierSeries {
    double period = 1.0;
    M constant{};
    std::vector<M> cos_coeffs;
    std::vector<M> sin_coeffs;

    int harmonics() const { return static_cast<int>(cos_coeffs.size()); }
    bool is_constant() const { return cos_coeffs.empty() && sin_coeffs.empty(); }

    M operator()(double t) const {
        M out = constant;
        const double w = 2.0 * M_PI / period;
        for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
            double ph = w * (k + 1) * t;
            out += cos_coeffs[k] * std::cos(ph);
            out += sin_coeffs[k] * std::sin(ph);
        }
        return out;
    }

    M derivative(double t) const {
        M out = constant;
        out *= 0.0;
        const double w = 2.0 * M_PI / period;
        for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
            double wk = w * (k + 1);
            double ph = wk * t;
            out += cos_coeffs[k] * (-wk * std::sin(ph));
            out += sin_coeffs[k] * (wk * std::cos(ph));
        }
        return out;
    }

    static FourierSeries constant_series(double T, M c) {
        FourierSeries s;
        s.period = T;
        s.constant = std::move(c);
        return s;
    }
};

}  // namespace oulevy
