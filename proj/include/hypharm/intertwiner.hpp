#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "psradon.hpp"
#include "quadrature.hpp"
#include "quantization.hpp"
#include "report.hpp"
#include "special.hpp"
#include "transforms.hpp"

namespace hypharm {

namespace detail {

// Composite Gauss-Legendre on [lo, hi] with at least `min_nodes` nodes and at least
// `per_radian` nodes per radian of an oscillation of angular frequency `freq`.
inline Rule oscillatory_rule(double lo, double hi, double freq, int min_nodes, double per_radian = 1.2) {
    constexpr int per_panel = 8;
    const int by_freq = static_cast<int>(std::ceil((hi - lo) * (std::abs(freq) + 1.0) * per_radian));
    const int panels = std::max((min_nodes + per_panel - 1) / per_panel, (by_freq + per_panel - 1) / per_panel);
    return composite_gauss_legendre(panels, per_panel, lo, hi);
}

// Radius beyond which a function of the given decay class is negligible.
inline double effective_radius(const DecayClass& d, double fallback) {
    switch (d.kind) {
    case DecayClass::Kind::compact: return d.param;
    case DecayClass::Kind::gaussian: return std::sqrt((37.0 + std::log(std::max(d.amplitude, 1.0))) / d.param);
    case DecayClass::Kind::exponential: return fallback;
    }
    return fallback;
}

// Clamps a window radius to line_halfwidth, refusing when the envelope beyond the clamp,
// at distance `reach - offset` from the origin, is not negligible against q.tol.
inline double clamp_window(const DecayClass& d, double reach, double offset, const QuadratureSpec& q, const char* where) {
    if (reach <= q.line_halfwidth) return reach;
    const double s = q.line_halfwidth - offset;
    if (s <= 0.0 || d.amplitude * d.envelope(s) > 1e-3 * q.tol)
        throw TailTooFat(std::string(where) + ": line_halfwidth too short for the declared decay");
    return q.line_halfwidth;
}

} // namespace detail

// L_nu a(g) = int a(g n_u) (1 + u^2)^{-(1/2 + nu)} du, computed with u = sinh v, where the
// weight becomes cosh(v)^{-2 nu} dv.
inline cplx l_nu(const GroupFunction& a, cplx nu, const GroupElement& g, const QuadratureSpec& q) {
    q.validate();
    const double dg = radius_of(act(g, cplx(0.0)));
    double V = q.line_halfwidth;
    if (a.decay.kind == DecayClass::Kind::exponential) {
        // |a(g n_u)| <~ C e^{-p d}, d >= 2 log(cosh v) - d_g; weight |cosh v|^{-2 Re nu}
        const double rate = 2.0 * a.decay.param + 2.0 * nu.real();
        if (rate <= 0.0) throw TailTooFat("l_nu: integrand does not decay along the horocycle");
        const double tail = 2.0 * a.decay.amplitude * std::exp(a.decay.param * dg) * std::pow(2.0, rate) *
                            std::exp(-rate * V) / rate;
        if (tail > q.tol) throw TailTooFat("l_nu: horocycle tail exceeds the tolerance");
    } else {
        // d(g n_u o, o) >= d(n_u o, o) - d_g = 2 asinh(|u| / 2) - d_g
        const double reach = detail::effective_radius(a.decay, q.line_halfwidth) + dg;
        V = std::min(V, std::asinh(2.0 * std::sinh(0.5 * reach)) + 1e-9);
        if (V == q.line_halfwidth &&
            a.decay.amplitude * a.decay.envelope(std::max(0.0, 2.0 * std::asinh(0.5 * std::sinh(V)) - dg)) > 1e-3 * q.tol)
            throw TailTooFat("l_nu: line_halfwidth too short for the declared decay");
    }
    const Rule v = detail::oscillatory_rule(-V, V, 2.0 * std::abs(nu.imag()), q.line_nodes);
    return parallel_sum<cplx>(v.size(), [&](std::size_t k) {
        const double ch = std::cosh(v.x[k]);
        return v.w[k] * a(g * n_u(std::sinh(v.x[k]))) * std::exp(-2.0 * nu * std::log(ch));
    });
}

// 2^{1 + i(r + r')} PS(L_{ir'} a)(ir, b, ir', b') for a function a on G, i.e.
//   2^{1 + i(r + r')} |b - b'|^{-(1 + i(r + r'))} int L_{ir'} a(g(b', b) a_t) e^{i(r - r') t} dt.
// n_u fixes the forward endpoint, so the horocycle through g(b', b) a_t o sits at Busemann height
// t relative to the closest point of the geodesic; it meets the support only for |t| <= radius + d0.
inline cplx lpsw_pairing(const GroupFunction& a, double r, BoundaryPoint b, double rp, BoundaryPoint bp,
                         const QuadratureSpec& q) {
    q.validate();
    detail::check_pair(b, bp);
    const GroupElement g0 = geodesic_frame(bp, b);
    const double d0 = radius_of(act(g0, cplx(0.0)));
    const double T = a.decay.kind == DecayClass::Kind::exponential
                         ? q.line_halfwidth
                         : detail::clamp_window(a.decay, detail::effective_radius(a.decay, q.line_halfwidth) + d0 + 1e-9, d0, q,
                                                "lpsw_pairing");
    const Rule t = detail::oscillatory_rule(-T, T, r - rp, q.line_nodes);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k)
        acc += t.w[k] * l_nu(a, cplx(0.0, rp), g0 * a_t(t.x[k]), q) * std::polar(1.0, (r - rp) * t.x[k]);
    const double d = std::abs(b.value() - bp.value());
    const cplx s(1.0, r + rp);
    return std::exp(s * std::log(2.0)) * std::exp(-s * std::log(d)) * acc;
}

// Windows for the (v, tau) plane of the direct route.
struct LPlane {
    Rule v, tau;
};

inline LPlane l_plane(const GroupElement& g, const DecayClass& decay, double R, const QuadratureSpec& q) {
    const double dg = radius_of(act(g, cplx(0.0)));
    const double reach = decay.kind == DecayClass::Kind::exponential
                             ? q.line_halfwidth
                             : detail::clamp_window(decay, detail::effective_radius(decay, q.line_halfwidth) + dg + 1.0, dg + 1.0, q,
                                                    "l_apply_direct");
    const double V = std::asinh(2.0 * std::sinh(0.5 * reach));
    LPlane p;
    p.v = detail::oscillatory_rule(-V, V, 2.0 * std::abs(R), q.line_nodes);
    p.tau = detail::oscillatory_rule(-reach, reach, 2.0 * std::abs(R), q.line_nodes);
    return p;
}

// L a(g, R) = (2^{1 + 2iR} / pi) int (1 + u^2)^{-(1/2 + iR)} a(g a_{tau - log(1+u^2)/2} n_u, r) e^{2i(r - R) tau} dr du dtau.
// The r-integral is the symbol's r-Fourier transform at 2 tau; u = sinh v.
inline cplx l_apply_direct(const Symbol& a, const GroupElement& g, cplx R, const QuadratureSpec& q) {
    q.validate();
    if (std::abs(R.imag()) > 0.5 * a.analytic_strip)
        throw AnalyticStripExceeded("l_apply_direct: |Im R| exceeds half the analytic strip");
    const LPlane P = l_plane(g, a.decay, R.real(), q);
    const Rule r_rule = gauss_legendre(q.r_nodes, -q.r_halfwidth, q.r_halfwidth);
    const std::size_t nv = P.v.size(), nt = P.tau.size();
    const cplx acc = parallel_sum<cplx>(nv * nt, [&](std::size_t idx) {
        const std::size_t iv = idx / nt, it = idx % nt;
        const double v = P.v.x[iv], tau = P.tau.x[it];
        const double lch = std::log(std::cosh(v));
        const GroupElement gp = g * a_t(tau - lch) * n_u(std::sinh(v));
        const cplx z = act(gp, cplx(0.0)), b = act_boundary(gp, cplx(1.0));
        const cplx w = std::exp(cplx(0.0, -2.0) * R * (lch + tau));
        return P.v.w[iv] * P.tau.w[it] * w * a.r_fourier(z, b, tau, r_rule);
    });
    return std::exp(cplx(1.0, 0.0) * (1.0 + cplx(0.0, 2.0) * R) * std::log(2.0)) / pi * acc;
}

// The same operator without the 2^{1+2iR}/pi prefactor.
inline cplx l_apply_unscaled(const Symbol& a, const GroupElement& g, cplx R, const QuadratureSpec& q) {
    return l_apply_direct(a, g, R, q) * pi / std::exp((1.0 + cplx(0.0, 2.0) * R) * std::log(2.0));
}

// Spectral route: L a(g, R) = (1/pi) e^{2iRt} |b - b'|^{1 + 2iR} int W a(r, b, 2R - r, b') e^{-2irt} dr
// with (b', b, t) the geodesic coordinates of g. Uses closed-form Wigner values when available.
inline cplx l_apply_spectral(const Symbol& a, const GroupElement& g, double R, const QuadratureSpec& q) {
    q.validate();
    const GeodesicCoords c = to_geodesic_coords(g);
    const double t = c.tau;
    const Rule r = detail::oscillatory_rule(R - q.r_halfwidth, R + q.r_halfwidth, 2.0 * t, q.r_nodes);
    const cplx b = c.b_plus.value(), bp = c.b_minus.value();
    cplx acc = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const auto w = a.wigner_exact(r.x[k], b, 2.0 * R - r.x[k], bp);
        const cplx W = w ? *w : wigner_transform(a, r.x[k], c.b_plus, 2.0 * R - r.x[k], c.b_minus, q);
        acc += r.w[k] * W * std::polar(1.0, -2.0 * r.x[k] * t);
    }
    const double d = std::abs(b - bp);
    return std::polar(1.0, 2.0 * R * t) * std::exp(cplx(1.0, 2.0 * R) * std::log(d)) * acc / pi;
}

// Spectral route from a tabulated Wigner transform: r runs over the table's r axis (with its
// weights), W(r, b, 2R - r, b') is interpolated cubically in r' and trigonometrically in b, b'.
inline cplx l_apply_spectral(const WignerTable& W, const GroupElement& g, double R, double tol = 1e-3) {
    const GeodesicCoords c = to_geodesic_coords(g);
    const double t = c.tau;
    const std::size_t NRP = W.rp.size(), NBP = W.bp.size();
    const std::vector<double> wbp = trig_weights(W.bp, c.b_minus.angle);
    cplx acc = 0.0;
    double vmax = 0.0, err = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < W.r.size(); ++i) {
        const std::vector<cplx> row = wigner_row(W, W.r.x[i], c.b_plus, tol);
        auto at_rp = [&](std::size_t k) {
            cplx s = 0.0;
            for (std::size_t l = 0; l < NBP; ++l) s += wbp[l] * row[k * NBP + l];
            return s;
        };
        for (std::size_t k = 0; k < NRP; k += std::max<std::size_t>(1, NRP / 16)) vmax = std::max(vmax, std::abs(at_rp(k)));
        const double rp = 2.0 * R - W.r.x[i];
        if (rp < W.rp.x.front() || rp > W.rp.x.back()) {
            edge = std::max({edge, std::abs(at_rp(0)), std::abs(at_rp(NRP - 1))});
            continue;
        }
        const LocalWeights lw = cubic_weights(W.rp.x, rp);
        cplx v = 0.0, e = 0.0;
        for (int a = 0; a < 4; ++a) {
            const cplx x = at_rp(lw.first + a);
            v += lw.w[a] * x;
            e += lw.dw[a] * x;
        }
        err = std::max(err, std::abs(e));
        acc += W.r.w[i] * v * std::polar(1.0, -2.0 * W.r.x[i] * t);
    }
    if (err > tol * vmax || edge > tol * vmax)
        throw GridTooCoarse("l_apply_spectral: Wigner table does not resolve the slice r + r' = 2R");
    const double d = std::abs(c.b_plus.value() - c.b_minus.value());
    return std::polar(1.0, 2.0 * R * t) * std::exp(cplx(1.0, 2.0 * R) * std::log(d)) * acc / pi;
}

// L a / (2^{1+2iR} mu0(1/2 + iR)), equivalently L_unscaled / (pi mu0),
// so that the normalized operator maps 1 to 1.
inline cplx l_normalizer(cplx R) {
    return std::exp((1.0 + cplx(0.0, 2.0) * R) * std::log(2.0)) * mu0(0.5 + cplx(0.0, 1.0) * R).value;
}

inline cplx l_normalized(const Symbol& a, const GroupElement& g, cplx R, const QuadratureSpec& q) {
    const cplx n = l_normalizer(R);
    return l_apply_direct(a, g, R, q) / n;
}

// L a viewed as a function on G x R (evaluated by the spectral route), wrapped as a symbol.
class LTransformed : public Symbol {
  public:
    LTransformed(SymbolPtr base, const QuadratureSpec& q) : base_(std::move(base)), q_(q) {
        decay = DecayClass::exponential(1.0);
        analytic_strip = 0.0;
    }

    cplx value(cplx z, cplx b, cplx R) const override {
        return l_apply_spectral(*base_, from_zb(z, b), R.real(), q_);
    }

  private:
    SymbolPtr base_;
    QuadratureSpec q_;
};

// V^t a, defined through W(V^t a)(r, b, r', b') = e^{-i (r^2 - r'^2) t / 2} W a(r, b, r', b').
// route closed_form delegates to the base symbol's own evolution when it has one; route wigner
// evaluates a^t(z, b, r) = e^{-(1/2+ir)<z,b>} (1/2) int_R int_B e^{(1/2 - ir')<z,b'>} W^t db' dp(r').
class EvolvedSymbol : public Symbol {
  public:
    enum class Route { closed_form, wigner };

    EvolvedSymbol(SymbolPtr base, double t, const QuadratureSpec& q, Route route = Route::closed_form)
        : base_(std::move(base)), t_(t), q_(q) {
        if (!base_->weyl_symmetric) throw Error("schrodinger_evolve: the symbol must be Weyl symmetric");
        if (route == Route::closed_form) exact_ = base_->evolved_exact(t);
        weyl_symmetric = true;
        rotation_invariant = base_->rotation_invariant;
        analytic_strip = 0.0;
        decay = exact_ ? exact_->decay : base_->decay;
        r_decay = base_->r_decay;
    }

    const Symbol& base() const { return *base_; }
    double time() const { return t_; }
    bool closed_form() const { return static_cast<bool>(exact_); }

    cplx value(cplx z, cplx b, cplx r) const override {
        if (exact_) return exact_->value(z, b, r);
        return spectral_value(z, b, r.real());
    }

    std::vector<cplx> values_r(cplx z, cplx b, const std::vector<double>& rs) const override {
        if (exact_) return exact_->values_r(z, b, rs);
        return Symbol::values_r(z, b, rs);
    }

    cplx r_fourier(cplx z, cplx b, double tau, const Rule& rule) const override {
        if (exact_) return exact_->r_fourier(z, b, tau, rule);
        return Symbol::r_fourier(z, b, tau, rule);
    }

    std::optional<cplx> wigner_exact(double r, cplx b, double rp, cplx bp) const override {
        const auto w = base_->wigner_exact(r, b, rp, bp);
        if (!w) return std::nullopt;
        return *w * std::polar(1.0, -0.5 * (r * r - rp * rp) * t_);
    }

    std::shared_ptr<const Symbol> evolved_exact(double t) const override {
        if (!exact_) return nullptr;
        return exact_->evolved_exact(t);
    }

  private:
    cplx base_wigner(double r, cplx b, double rp, cplx bp) const {
        const auto w = base_->wigner_exact(r, b, rp, bp);
        if (w) return *w;
        return wigner_transform(*base_, r, BoundaryPoint::from_complex(b), rp, BoundaryPoint::from_complex(bp), q_);
    }

    cplx spectral_value(cplx z, cplx b, double r) const {
        const Rule rp = symmetric_spectral_rule(q_.r_halfwidth, q_.r_nodes);
        const Rule bp = boundary_rule(radius_of(z), q_);
        cplx acc = 0.0;
        for (std::size_t l = 0; l < bp.size(); ++l) {
            const cplx bb = std::polar(1.0, bp.x[l]);
            const double bz = busemann(z, bb);
            cplx col = 0.0;
            for (std::size_t k = 0; k < rp.size(); ++k) {
                const double x = rp.x[k];
                const cplx W = base_wigner(r, b, x, bb) * std::polar(1.0, -0.5 * (r * r - x * x) * t_);
                col += rp.w[k] * plancherel_density(x) * W * std::exp(cplx(0.5, -x) * bz);
            }
            acc += bp.w[l] * col;
        }
        return std::exp(-cplx(0.5, r) * busemann(z, b)) * 0.5 * acc;
    }

    SymbolPtr base_;
    double t_;
    QuadratureSpec q_;
    SymbolPtr exact_;
};

inline std::shared_ptr<const EvolvedSymbol> schrodinger_evolve(SymbolPtr a, double t, const QuadratureSpec& q,
                                                               EvolvedSymbol::Route route = EvolvedSymbol::Route::closed_form) {
    return std::make_shared<EvolvedSymbol>(std::move(a), t, q, route);
}

// (G^t f)(g, R) = f(g a_{Rt}, R)
using FlowFunction = std::function<cplx(const GroupElement&, double)>;

inline FlowFunction geodesic_evolve(FlowFunction f, double t) {
    return [f = std::move(f), t](const GroupElement& g, double R) { return f(g * a_t(R * t), R); };
}

struct IntertwiningProbe {
    GroupElement g;
    double R = 1.0;
};

// Residuals of L(V^t a)(g, R) = (L a)(g a_{Rt}, R): both sides by the direct route, plus a
// cross-check row comparing the left side with the spectral route.
inline std::vector<ResidualReport> verify_intertwining(SymbolPtr a, double t, const std::vector<IntertwiningProbe>& probes,
                                                       const QuadratureSpec& q) {
    const auto at = schrodinger_evolve(a, t, q);
    std::vector<ResidualReport> out;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto& p = probes[i];
        const cplx lhs = l_apply_direct(*at, p.g, p.R, q);
        const cplx rhs = l_apply_direct(*a, p.g * a_t(p.R * t), p.R, q);
        const cplx spec = l_apply_spectral(*at, p.g, p.R, q);
        const std::string id = "p" + std::to_string(i);
        out.push_back(ResidualReport::make("intertwining", id, lhs, rhs, std::abs(lhs - spec)));
        out.push_back(ResidualReport::make("intertwining-route-crosscheck", id, lhs, spec, 0.0));
    }
    return out;
}

// L^{-1} a(g, r) = int a(g n_u a_{tau + log(1+u^2)/2}; (r + r')/2) (1 + u^2)^{(-1 + ir + ir')/2} e^{i(r - r') tau}
//                  (2^{-(1 + ir + ir')} / pi) du dp(r') dtau,  r' in (0, r_halfwidth].
// With u = sinh v the weight is cosh(v)^{i(r + r')} dv. Both v and tau run over
// [-line_halfwidth, line_halfwidth]; for a = L b the integrand decays like e^{-|v|} along the
// horocycle, so the v-window sets the accuracy.
inline cplx l_inverse(const Symbol& a, const GroupElement& g, double r, const QuadratureSpec& q) {
    q.validate();
    const Rule rp = gauss_legendre(q.r_nodes, 0.0, q.r_halfwidth);
    const double T = q.line_halfwidth;
    const Rule v = detail::oscillatory_rule(-T, T, 4.0, q.line_nodes);
    const Rule tau = detail::oscillatory_rule(-T, T, 2.0 * std::abs(r) + 4.0, q.line_nodes);
    std::vector<double> Rs(rp.size());
    for (std::size_t k = 0; k < rp.size(); ++k) Rs[k] = 0.5 * (r + rp.x[k]);
    const std::size_t nv = v.size(), nt = tau.size();
    const cplx acc = parallel_sum<cplx>(nv * nt, [&](std::size_t idx) {
        const std::size_t iv = idx / nt, it = idx % nt;
        const double lch = std::log(std::cosh(v.x[iv]));
        const GroupElement gp = g * n_u(std::sinh(v.x[iv])) * a_t(tau.x[it] + lch);
        const cplx z = act(gp, cplx(0.0)), b = act_boundary(gp, cplx(1.0));
        const std::vector<cplx> vals = a.values_r(z, b, Rs);
        cplx s = 0.0;
        for (std::size_t k = 0; k < rp.size(); ++k) {
            const double sum = r + rp.x[k], diff = r - rp.x[k];
            const cplx w = std::polar(0.5, diff * tau.x[it] + sum * (lch - std::log(2.0)));
            s += rp.w[k] * plancherel_density(rp.x[k]) * vals[k] * w;
        }
        return v.w[iv] * tau.w[it] * s;
    });
    return acc / pi;
}

} // namespace hypharm
