#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include "parallel.hpp"
#include "quadrature.hpp"
#include "quantization.hpp"
#include "special.hpp"
#include "transforms.hpp"

namespace hypharm {

// Finite-rank kernel K(z, w) = sum_m c_m f_m(z) conj(f_m(w)) with
//   f_m(z) = phi_m(s) e^{i m theta},  phi_m(s) = tanh(s/2)^{|m|} e^{-alpha s^2} cos(kappa s),
// where z = tanh(s/2) e^{i theta}. Its symbol, Wigner transform and Schrodinger evolution reduce to
// one-dimensional radial integrals against the conical functions p_m(s, r).
struct HarmonicMode {
    int m = 0;
    cplx c = 1.0;
    double alpha = 1.0;
    double kappa = 0.0;
};

struct HarmonicSettings {
    double s_max = 14.0;   // radial cut for all radial tables
    double h = 0.0025;     // radial step
    double r_max = 16.0;   // spectral cut
    int r_panels = 40;     // composite Gauss-Legendre on [0, r_max] for evolution tables
    int r_per_panel = 10;
    int g_nodes = 96;      // Chebyshev nodes for g_m on [0, r_max]
    double x_max = 48.0;   // range of the r-Fourier tables
    double dx = 0.01;
    int x_panels = 160;    // composite Gauss-Legendre on [-r_max, r_max] for the r-Fourier tables
    int x_per_panel = 8;
};

class HarmonicModel {
  public:
    HarmonicModel(std::vector<HarmonicMode> modes, HarmonicSettings st = {}) : modes_(std::move(modes)), st_(st) {
        if (modes_.empty()) throw Error("HarmonicModel: no modes");
        const auto nodes = ChebyshevInterp<double>::nodes(st_.g_nodes, 0.0, st_.r_max);
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            const std::vector<double> vals = parallel_map<double>(nodes.size(), [&](std::size_t k) {
                return radial_transform(i, nodes[k]);
            });
            g_.emplace_back(0.0, st_.r_max, vals);
        }
        // dense copy for fast lookups, cubic Lagrange on a uniform grid
        ng_ = static_cast<int>(std::ceil(st_.r_max / g_step));
        dense_.resize(modes_.size());
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            dense_[i].resize(ng_ + 3);
            for (int j = -1; j <= ng_ + 1; ++j) dense_[i][j + 1] = g_[i](std::min(std::abs(j * g_step), st_.r_max));
        }
    }

    const std::vector<HarmonicMode>& modes() const { return modes_; }
    const HarmonicSettings& settings() const { return st_; }

    double phi(std::size_t i, double s) const {
        const HarmonicMode& md = modes_[i];
        return std::pow(std::tanh(0.5 * s), std::abs(md.m)) * std::exp(-md.alpha * s * s) * std::cos(md.kappa * s);
    }

    cplx f(std::size_t i, cplx z) const {
        const double s = radius_of(z);
        if (s == 0.0) return modes_[i].m == 0 ? cplx(phi(i, 0.0)) : cplx(0.0);
        return phi(i, s) * std::polar(1.0, modes_[i].m * std::arg(z));
    }

    // g_m(r) = 2 pi int phi_m(s) p_m(s, r) sinh(s) ds, even in r
    double g(std::size_t i, double r) const {
        r = std::abs(r);
        if (r > st_.r_max) return 0.0;
        const double y = r / g_step;
        const int j = std::min(static_cast<int>(y), ng_ - 1);
        const double u = y - j;
        const double* p = &dense_[i][j];  // nodes j-1 .. j+2
        return -u * (u - 1) * (u - 2) / 6.0 * p[0] + (u + 1) * (u - 1) * (u - 2) / 2.0 * p[1] -
               (u + 1) * u * (u - 2) / 2.0 * p[2] + (u + 1) * u * (u - 1) / 6.0 * p[3];
    }

    // the Chebyshev interpolant itself, for checking the dense table
    double g_reference(std::size_t i, double r) const {
        r = std::abs(r);
        return r > st_.r_max ? 0.0 : g_[i](r);
    }

    static constexpr double g_step = 0.002;

    // G_m(r) = (1/2 + i r)_{|m|} g_m(r) = int conj(f_m(w)) e^{(1/2 + i r)<w, 1>} dw
    cplx G(std::size_t i, double r) const { return pochhammer(cplx(0.5, r), std::abs(modes_[i].m)) * g(i, r); }

    double min_alpha() const {
        double a = 1e300;
        for (const auto& md : modes_) a = std::min(a, md.alpha);
        return a;
    }

  private:
    double radial_transform(std::size_t i, double r) const {
        const ConicalRadial p(std::abs(modes_[i].m), r, st_.s_max, st_.h);
        const auto& v = p.values();
        const int n = p.intervals();
        // Simpson on the RK4 grid
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double s = j * st_.h;
            const double wj = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            acc += wj * phi(i, s) * v[j] * std::sinh(s);
        }
        return two_pi * acc * st_.h / 3.0;
    }

    std::vector<HarmonicMode> modes_;
    HarmonicSettings st_;
    std::vector<ChebyshevInterp<double>> g_;
    int ng_ = 0;
    std::vector<std::vector<double>> dense_;
};

// Symbol of the harmonic kernel evolved by time t:
//   a^t(z, b, r) = e^{-(1/2 + i r)<z, b>} sum_m c_m e^{i m (theta - beta)} h^t_m(s) G_m(r) e^{-i r^2 t / 2},
//   h^t_m(s) = int_{R+} e^{i r^2 t / 2} |(1/2 + i r)_{|m|}|^2 g_m(r) p_m(s, r) dp(r),  h^0_m = phi_m.
class HarmonicSymbol : public Symbol {
  public:
    HarmonicSymbol(std::shared_ptr<const HarmonicModel> model, double t = 0.0) : model_(std::move(model)), t_(t) {
        weyl_symmetric = true;
        rotation_invariant = true;
        analytic_strip = 0.0;
        decay = DecayClass::gaussian(model_->min_alpha());
        r_decay = {SpectralDecay::Kind::gaussian, 0.25};
        if (t_ != 0.0) {
            build_radial();
            fit_decay();
        }
    }

    double time() const { return t_; }
    const HarmonicModel& model() const { return *model_; }
    std::shared_ptr<const HarmonicModel> model_ptr() const { return model_; }

    // the radial profile h^t_m(s)
    cplx radial(std::size_t i, double s) const {
        if (t_ == 0.0) return model_->phi(i, s);
        const HarmonicSettings& st = model_->settings();
        if (s >= n_ * st.h) return 0.0;
        const int j = std::min(static_cast<int>(s / st.h), n_ - 1);
        const double u = (s - j * st.h) / st.h, u2 = u * u, u3 = u2 * u;
        const std::vector<cplx>& H = H_[i];
        const std::vector<cplx>& dH = dH_[i];
        return (2 * u3 - 3 * u2 + 1) * H[j] + (u3 - 2 * u2 + u) * st.h * dH[j] + (-2 * u3 + 3 * u2) * H[j + 1] +
               (u3 - u2) * st.h * dH[j + 1];
    }

    cplx value(cplx z, cplx b, cplx rc) const override {
        const double r = rc.real();
        const cplx amp = angular_sum(z, b, [&](std::size_t i) { return model_->G(i, r); });
        return std::exp(-cplx(0.5, r) * busemann(z, b)) * amp * std::polar(1.0, -0.5 * r * r * t_);
    }

    std::vector<cplx> values_r(cplx z, cplx b, const std::vector<double>& rs) const override {
        const std::size_t nm = model_->modes().size();
        std::vector<cplx> coef(nm);
        for (std::size_t i = 0; i < nm; ++i) coef[i] = mode_factor(i, z, b);
        const double bz = busemann(z, b);
        std::vector<cplx> out(rs.size());
        for (std::size_t k = 0; k < rs.size(); ++k) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < nm; ++i) acc += coef[i] * model_->G(i, rs[k]);
            out[k] = std::exp(-cplx(0.5, rs[k]) * bz) * acc * std::polar(1.0, -0.5 * rs[k] * rs[k] * t_);
        }
        return out;
    }

    // closed form: e^{-<z,b>/2} sum_m c_m e^{i m (theta - beta)} h^t_m(s) Ghat^t_m(2 tau - <z, b>)
    cplx r_fourier(cplx z, cplx b, double tau, const Rule&) const override {
        ensure_fourier();
        const double bz = busemann(z, b);
        const double x = 2.0 * tau - bz;
        const cplx amp = angular_sum(z, b, [&](std::size_t i) { return fourier_at(i, x); });
        return std::exp(-0.5 * bz) * amp;
    }

    std::optional<cplx> wigner_exact(double r, cplx b, double rp, cplx bp) const override {
        const auto& md = model_->modes();
        const double db = std::arg(bp) - std::arg(b);
        cplx acc = 0.0;
        for (std::size_t i = 0; i < md.size(); ++i)
            acc += md[i].c * std::polar(1.0, md[i].m * db) * model_->G(i, r) * model_->G(i, rp);
        return acc * std::polar(1.0, -0.5 * (r * r - rp * rp) * t_);
    }

    std::shared_ptr<const Symbol> evolved_exact(double t) const override {
        return std::make_shared<HarmonicSymbol>(model_, t_ + t);
    }

  private:
    cplx mode_factor(std::size_t i, cplx z, cplx b) const {
        const HarmonicMode& md = model_->modes()[i];
        const double s = radius_of(z);
        if (md.m != 0 && s == 0.0) return 0.0;
        const double th = s == 0.0 ? 0.0 : std::arg(z);
        return md.c * std::polar(1.0, md.m * (th - std::arg(b))) * radial(i, s);
    }

    template <typename F>
    cplx angular_sum(cplx z, cplx b, F&& spectral) const {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < model_->modes().size(); ++i) {
            const cplx mf = mode_factor(i, z, b);
            if (mf != 0.0) acc += mf * spectral(i);
        }
        return acc;
    }

    // Evolution moves radial mass outwards by about kappa t while the width grows like a free
    // Gaussian. Declare half the spread rate, with the amplitude fitted to the tables above
    // their quadrature floor (1e-10 of the peak).
    void fit_decay() {
        const double a = model_->min_alpha();
        const double rate = 0.5 * a / (1.0 + 4.0 * a * a * t_ * t_);
        const double h = model_->settings().h;
        std::vector<double> v(n_ + 1, 0.0);
        for (int j = 0; j <= n_; ++j)
            for (std::size_t i = 0; i < H_.size(); ++i) v[j] += std::abs(model_->modes()[i].c) * std::abs(H_[i][j]);
        const double floor = 1e-10 * *std::max_element(v.begin(), v.end());
        double amp = 1.0;
        for (int j = 0; j <= n_; ++j)
            if (v[j] > floor) amp = std::max(amp, v[j] * std::exp(rate * (j * h) * (j * h)));
        decay = DecayClass::gaussian(rate, amp);
    }

    void build_radial() {
        const HarmonicSettings& st = model_->settings();
        const Rule r = composite_gauss_legendre(st.r_panels, st.r_per_panel, 0.0, st.r_max);
        n_ = static_cast<int>(std::ceil(st.s_max / st.h));
        const std::size_t nm = model_->modes().size();
        H_.assign(nm, std::vector<cplx>(n_ + 1, 0.0));
        dH_.assign(nm, std::vector<cplx>(n_ + 1, 0.0));
        for (std::size_t i = 0; i < nm; ++i) {
            const int m = std::abs(model_->modes()[i].m);
            // per-node contributions, summed in node order afterwards
            std::vector<std::vector<double>> pv(r.size()), dv(r.size());
            std::vector<cplx> wk(r.size());
            parallel_for(r.size(), [&](std::size_t k) {
                const double rk = r.x[k];
                const ConicalRadial p(m, rk, st.s_max, st.h);
                pv[k] = p.values();
                dv[k] = p.derivatives();
                wk[k] = r.w[k] * plancherel_density(rk) * std::norm(pochhammer(cplx(0.5, rk), m)) * model_->g(i, rk) *
                        std::polar(1.0, 0.5 * rk * rk * t_);
            });
            for (std::size_t k = 0; k < r.size(); ++k)
                for (int j = 0; j <= n_; ++j) {
                    H_[i][j] += wk[k] * pv[k][j];
                    dH_[i][j] += wk[k] * dv[k][j];
                }
        }
    }

    // Ghat^t_m(x) = int_R G_m(r) e^{-i r^2 t/2} e^{i r x} dr on a uniform x grid, with derivative
    void ensure_fourier() const {
        std::call_once(fourier_once_, [this] {
            const HarmonicSettings& st = model_->settings();
            const Rule r = composite_gauss_legendre(st.x_panels, st.x_per_panel, -st.r_max, st.r_max);
            nx_ = static_cast<int>(std::ceil(2.0 * st.x_max / st.dx));
            const std::size_t nm = model_->modes().size();
            Fx_.assign(nm, std::vector<cplx>(nx_ + 1));
            dFx_.assign(nm, std::vector<cplx>(nx_ + 1));
            for (std::size_t i = 0; i < nm; ++i) {
                std::vector<cplx> c(r.size());
                for (std::size_t k = 0; k < r.size(); ++k)
                    c[k] = r.w[k] * model_->G(i, r.x[k]) * std::polar(1.0, -0.5 * r.x[k] * r.x[k] * t_);
                parallel_for(static_cast<std::size_t>(nx_ + 1), [&](std::size_t j) {
                    const double x = -st.x_max + j * st.dx;
                    cplx v = 0.0, dv = 0.0;
                    for (std::size_t k = 0; k < r.size(); ++k) {
                        const cplx e = c[k] * std::polar(1.0, r.x[k] * x);
                        v += e;
                        dv += cplx(0.0, r.x[k]) * e;
                    }
                    Fx_[i][j] = v;
                    dFx_[i][j] = dv;
                });
            }
        });
    }

    cplx fourier_at(std::size_t i, double x) const {
        const HarmonicSettings& st = model_->settings();
        const double y = (x + st.x_max) / st.dx;
        if (y < 0.0 || y >= nx_) return 0.0;
        const int j = std::min(static_cast<int>(y), nx_ - 1);
        const double u = y - j, u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * Fx_[i][j] + (u3 - 2 * u2 + u) * st.dx * dFx_[i][j] +
               (-2 * u3 + 3 * u2) * Fx_[i][j + 1] + (u3 - u2) * st.dx * dFx_[i][j + 1];
    }

    std::shared_ptr<const HarmonicModel> model_;
    double t_ = 0.0;
    int n_ = 0;
    std::vector<std::vector<cplx>> H_, dH_;

    mutable std::once_flag fourier_once_;
    mutable int nx_ = 0;
    mutable std::vector<std::vector<cplx>> Fx_, dFx_;
};

inline std::shared_ptr<const HarmonicModel> make_harmonic_model(std::vector<HarmonicMode> modes,
                                                                HarmonicSettings st = {}) {
    return std::make_shared<HarmonicModel>(std::move(modes), st);
}

inline std::shared_ptr<const HarmonicSymbol> harmonic_symbol(std::shared_ptr<const HarmonicModel> model, double t = 0.0) {
    return std::make_shared<HarmonicSymbol>(std::move(model), t);
}

inline KernelFunction harmonic_kernel(std::shared_ptr<const HarmonicModel> model) {
    KernelFunction K;
    K.k = [model](cplx z, cplx w) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < model->modes().size(); ++i)
            acc += model->modes()[i].c * model->f(i, z) * std::conj(model->f(i, w));
        return acc;
    };
    K.decay = DecayClass::gaussian(model->min_alpha());
    K.rotation_invariant = true;
    return K;
}

// The standard test model: a few angular modes with spread-out radial frequencies.
inline std::vector<HarmonicMode> default_harmonic_modes() {
    return {{0, cplx(1.0, 0.0), 1.0, 3.5}, {1, cplx(0.6, 0.2), 1.0, 1.5}, {-2, cplx(0.3, -0.1), 0.8, 5.5}};
}

} // namespace hypharm
