#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

namespace hypharm {

// log Gamma(z) for complex z (Lanczos, g = 7, 9 terms), principal branch up to 2 pi i.
inline cplx lgamma_complex(cplx z) {
    static constexpr std::array<double, 9> p = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return std::log(pi) - std::log(std::sin(pi * z)) - lgamma_complex(1.0 - z);
    }
    z -= 1.0;
    cplx x = p[0];
    for (int i = 1; i < 9; ++i) x += p[i] / (z + static_cast<double>(i));
    const cplx t = z + 7.5;
    return 0.5 * std::log(two_pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

inline cplx gamma_complex(cplx z) { return std::exp(lgamma_complex(z)); }

// (x)_m = x (x+1) ... (x+m-1)
inline cplx pochhammer(cplx x, int m) {
    cplx p = 1.0;
    for (int k = 0; k < m; ++k) p *= (x + static_cast<double>(k));
    return p;
}

struct Mu0Value {
    cplx s;
    cplx value;
};

// mu0(s) = Gamma(1/2) Gamma(s - 1/2) / Gamma(s); equals the integral of (1+u^2)^{-s} for Re s > 1/2.
inline Mu0Value mu0(cplx s) {
    const cplx q = s - 0.5;
    if (std::abs(q.imag()) < 1e-12 && q.real() < 0.5) {
        const double k = std::round(q.real());
        if (k <= 0.0 && std::abs(q.real() - k) < 1e-12) throw Mu0Pole("mu0: pole at s - 1/2 = " + std::to_string(k));
    }
    if (std::abs(s.imag()) < 1e-12 && s.real() < 0.5) {
        const double k = std::round(s.real());
        if (k <= 0.0 && std::abs(s.real() - k) < 1e-12) return {s, 0.0};
    }
    const cplx v = std::exp(0.5 * std::log(pi) + lgamma_complex(q) - lgamma_complex(s));
    return {s, v};
}

// Barycentric interpolation on Chebyshev points of the second kind.
template <typename T>
class ChebyshevInterp {
  public:
    ChebyshevInterp() = default;

    // nodes in ascending order: lo + (hi - lo) (1 - cos(pi k / N)) / 2
    static std::vector<double> nodes(int n, double lo, double hi) {
        std::vector<double> x(n);
        const int N = n - 1;
        for (int k = 0; k <= N; ++k) x[k] = 0.5 * (lo + hi) - 0.5 * (hi - lo) * std::cos(pi * k / N);
        return x;
    }

    ChebyshevInterp(double lo, double hi, std::vector<T> values)
        : lo_(lo), hi_(hi), f_(std::move(values)) {
        const int n = static_cast<int>(f_.size());
        if (n < 2) throw GridTooCoarse("ChebyshevInterp: need at least 2 nodes");
        x_ = nodes(n, lo, hi);
        w_.resize(n);
        for (int k = 0; k < n; ++k) {
            w_[k] = (k % 2 == 0) ? 1.0 : -1.0;
            if (k == 0 || k == n - 1) w_[k] *= 0.5;
        }
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& x() const { return x_; }
    const std::vector<T>& values() const { return f_; }

    T operator()(double x) const {
        T num{};
        double den = 0.0;
        for (std::size_t k = 0; k < x_.size(); ++k) {
            const double d = x - x_[k];
            if (d == 0.0) return f_[k];
            const double q = w_[k] / d;
            num += q * f_[k];
            den += q;
        }
        return num / den;
    }

  private:
    double lo_ = 0.0, hi_ = 1.0;
    std::vector<double> x_;
    std::vector<double> w_;
    std::vector<T> f_;
};

// p_m(s, r) = P^{-m}_{-1/2+ir}(cosh s), the regular solution of
//   p'' + coth(s) p' - m^2 p / sinh^2 s = -(1/4 + r^2) p,  p ~ tanh(s/2)^m / m!  at 0.
// Power series in tanh(s/2)^2 near the origin, classical RK4 on a uniform s-grid beyond.
class ConicalRadial {
  public:
    ConicalRadial() = default;

    ConicalRadial(int m, double r, double s_max, double h) : m_(m), r_(r), h_(h) {
        if (m < 0) throw Error("ConicalRadial: order must be nonnegative");
        n_ = static_cast<int>(std::ceil(s_max / h));
        p_.assign(n_ + 1, 0.0);
        dp_.assign(n_ + 1, 0.0);
        const int ja = std::max(1, static_cast<int>(std::round(series_limit / h)));
        for (int j = 0; j <= std::min(ja, n_); ++j) series(j * h, p_[j], dp_[j]);
        const double k2 = 0.25 + r * r;
        auto f = [&](double s, double y0, double y1, double& d0, double& d1) {
            const double sh = std::sinh(s);
            d0 = y1;
            d1 = -std::cosh(s) / sh * y1 + (m * m / (sh * sh) - k2) * y0;
        };
        for (int j = ja; j < n_; ++j) {
            const double s = j * h, y0 = p_[j], y1 = dp_[j];
            double a0, a1, b0, b1, c0, c1, e0, e1;
            f(s, y0, y1, a0, a1);
            f(s + 0.5 * h, y0 + 0.5 * h * a0, y1 + 0.5 * h * a1, b0, b1);
            f(s + 0.5 * h, y0 + 0.5 * h * b0, y1 + 0.5 * h * b1, c0, c1);
            f(s + h, y0 + h * c0, y1 + h * c1, e0, e1);
            p_[j + 1] = y0 + h / 6.0 * (a0 + 2.0 * b0 + 2.0 * c0 + e0);
            dp_[j + 1] = y1 + h / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + e1);
        }
    }

    int order() const { return m_; }
    double r() const { return r_; }
    double step() const { return h_; }
    int intervals() const { return n_; }
    double s_max() const { return n_ * h_; }
    const std::vector<double>& values() const { return p_; }
    const std::vector<double>& derivatives() const { return dp_; }

    // cubic Hermite interpolation; zero beyond the table
    double operator()(double s) const {
        if (s < 0.0) s = -s;
        if (s >= n_ * h_) return 0.0;
        const int j = std::min(static_cast<int>(s / h_), n_ - 1);
        const double t = (s - j * h_) / h_;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * p_[j] + (t3 - 2 * t2 + t) * h_ * dp_[j] +
               (-2 * t3 + 3 * t2) * p_[j + 1] + (t3 - t2) * h_ * dp_[j + 1];
    }

    static constexpr double series_limit = 0.1;

    // hypergeometric representation (1-x)^lam rho^m / m! 2F1(lam+m, lam; m+1; x), x = rho^2
    void series(double s, double& p, double& dpds) const {
        if (s == 0.0) {
            p = (m_ == 0) ? 1.0 : 0.0;
            dpds = (m_ == 1) ? 0.5 : 0.0;
            return;
        }
        const cplx lam(0.5, r_);
        const double rho = std::tanh(0.5 * s), x = rho * rho;
        cplx term = 1.0, sum = 1.0, dsum = 0.0;
        for (int k = 0; k < 400; ++k) {
            term *= (lam + static_cast<double>(m_ + k)) * (lam + static_cast<double>(k)) /
                    (static_cast<double>(m_ + 1 + k) * (k + 1.0)) * x;
            sum += term;
            dsum += static_cast<double>(k + 1) * term;
            if (std::abs(term) < 1e-18 * std::abs(sum) && k > 4) break;
        }
        double fact = 1.0;
        for (int k = 2; k <= m_; ++k) fact *= k;
        const cplx pref = std::exp(lam * std::log1p(-x)) * std::pow(rho, m_) / fact;
        const cplx val = pref * sum;
        // d/drho of each factor; dsum holds sum k t_k, so d(sum)/drho = 2 dsum / rho
        const cplx dval = val * (lam * (-2.0 * rho) / (1.0 - x) + static_cast<double>(m_) / rho) + pref * 2.0 * dsum / rho;
        p = val.real();
        dpds = (dval * (0.5 * (1.0 - x))).real();
    }

  private:
    int m_ = 0;
    double r_ = 0.0;
    double h_ = 0.01;
    int n_ = 0;
    std::vector<double> p_, dp_;
};

} // namespace hypharm
