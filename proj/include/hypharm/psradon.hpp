#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "quantization.hpp"
#include "spectral_table.hpp"
#include "special.hpp"
#include "transforms.hpp"

namespace hypharm {

// A function on G with a decay class in d(g.o, o).
struct GroupFunction {
    std::function<cplx(const GroupElement&)> f;
    DecayClass decay = DecayClass::gaussian(1.0);

    cplx operator()(const GroupElement& g) const { return f(g); }
};

// Angular collar around the diagonal of B x B skipped by every PS grid.
inline constexpr double ps_collar = 0.05;

namespace detail {

// Window [-T, T] in the geodesic time along g(b', b) a_t outside which a function of the given
// decay class is negligible. The geodesic passes at distance d0 from o, and
// d(g a_t o, o) >= |t| - d0.
inline double geodesic_window(const DecayClass& decay, BoundaryPoint b_minus, BoundaryPoint b_plus,
                              const QuadratureSpec& q) {
    const GroupElement g0 = geodesic_frame(b_minus, b_plus);
    const double d0 = radius_of(act(g0, cplx(0.0)));
    double reach = q.line_halfwidth;
    if (decay.kind == DecayClass::Kind::compact) reach = decay.param + d0 + 1e-9;
    if (decay.kind == DecayClass::Kind::gaussian) reach = std::sqrt(37.0 / decay.param) + d0;
    return std::min(q.line_halfwidth, reach);
}

inline void check_line_decay(const DecayClass& decay, double growth, const QuadratureSpec& q) {
    if (decay.kind == DecayClass::Kind::compact) return;
    if (decay.kind == DecayClass::Kind::exponential && decay.param <= growth)
        throw TailTooFat("function does not decay faster than the exponential weight along the geodesic");
    const double T = q.line_halfwidth;
    if (decay.amplitude * decay.envelope(0.5 * T) * std::exp(growth * T) > q.tol)
        throw TailTooFat("geodesic integrand not negligible at the window edge");
}

} // namespace detail

// R f(b', b, r) = int f(g(b', b) a_t) e^{-i r t} dt, with b' = b_minus and b = b_plus.
inline cplx radon_fourier(const GroupFunction& f, BoundaryPoint b_minus, BoundaryPoint b_plus, cplx r,
                          const QuadratureSpec& q) {
    q.validate();
    const GroupElement g0 = geodesic_frame(b_minus, b_plus);
    detail::check_line_decay(f.decay, std::abs(r.imag()), q);
    const double T = detail::geodesic_window(f.decay, b_minus, b_plus, q);
    const Rule t = gauss_legendre(q.line_nodes, -T, T);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) acc += t.w[k] * f(g0 * a_t(t.x[k])) * std::exp(cplx(0.0, -1.0) * r * t.x[k]);
    return acc;
}

// (1/2 pi) int R f(r) e^{i r t} dr over [-r_halfwidth, r_halfwidth]
inline cplx radon_inverse(const std::function<cplx(double)>& Rf, double t, const QuadratureSpec& q) {
    const Rule r = gauss_legendre(q.r_nodes, -q.r_halfwidth, q.r_halfwidth);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) acc += r.w[k] * Rf(r.x[k]) * std::polar(1.0, r.x[k] * t);
    return acc / two_pi;
}

namespace detail {

inline void check_pair(BoundaryPoint b, BoundaryPoint bp) {
    if (angular_separation(b.angle, bp.angle) <= default_eps_bb)
        throw DegenerateGeodesic("PS pairing: b = b'");
}

// |b - b'|^{-(1 + nu - conj(nu'))}
inline cplx ps_prefactor(cplx nu, BoundaryPoint b, cplx nup, BoundaryPoint bp) {
    return std::exp(-(1.0 + nu - std::conj(nup)) * std::log(std::abs(b.value() - bp.value())));
}

} // namespace detail

// PS a(nu, b, nu', b') = |b - b'|^{-(1 + nu - conj nu')} R a_rho(b', b, i(nu + conj nu')), rho = (nu - conj nu') / 2i.
// For nu = i r, nu' = i r' this is |b - b'|^{-(1 + i(r + r'))} int a(g(b', b) a_t, (r + r')/2) e^{i(r - r') t} dt.
inline cplx ps_transform(const Symbol& a, cplx nu, BoundaryPoint b, cplx nup, BoundaryPoint bp, const QuadratureSpec& q) {
    detail::check_pair(b, bp);
    const cplx rho = (nu - std::conj(nup)) / cplx(0.0, 2.0);
    a.check_frequency(rho);
    GroupFunction slice{[&a, rho](const GroupElement& g) { return a.at(g, rho); }, a.decay};
    return detail::ps_prefactor(nu, b, nup, bp) * radon_fourier(slice, bp, b, cplx(0.0, 1.0) * (nu + std::conj(nup)), q);
}

inline cplx ps_transform(const Symbol& a, double r, BoundaryPoint b, double rp, BoundaryPoint bp, const QuadratureSpec& q) {
    return ps_transform(a, cplx(0.0, r), b, cplx(0.0, rp), bp, q);
}

// The same pairing by the density of the PS distribution, |b - b'|^{-(1 + nu - conj nu')} e^{(nu + conj nu') tau},
// integrated against a along the geodesic in the (b', b, tau) coordinates with a trapezoid rule.
inline cplx ps_pairing_direct(const Symbol& a, cplx nu, BoundaryPoint b, cplx nup, BoundaryPoint bp, const QuadratureSpec& q) {
    detail::check_pair(b, bp);
    const cplx rho = (nu - std::conj(nup)) / cplx(0.0, 2.0);
    a.check_frequency(rho);
    const double T = detail::geodesic_window(a.decay, bp, b, q);
    const int n = 2 * q.line_nodes;
    const double h = 2.0 * T / n;
    const cplx dens = detail::ps_prefactor(nu, b, nup, bp);
    cplx acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double tau = -T + k * h;
        const double w = (k == 0 || k == n) ? 0.5 * h : h;
        acc += w * a.at(from_geodesic_coords({bp, b, tau}), rho) * std::exp((nu + std::conj(nup)) * tau);
    }
    return dens * acc;
}

// Wraps a function on G x R (as g, r) as a symbol with the given traits.
inline SymbolPtr group_symbol(std::function<cplx(const GroupElement&, cplx)> f, const SymbolTraits& tr) {
    return make_symbol([f = std::move(f)](cplx z, cplx b, cplx r) { return f(from_zb(z, b), r); }, tr);
}

// a(g, r) = f(g) exp(-(r - c)^2 / (2 w^2)), with the r-Fourier transform in closed form.
class ProductSymbol : public Symbol {
  public:
    ProductSymbol(GroupFunction f, double center, double width) : f_(std::move(f)), c_(center), w_(width) {
        decay = f_.decay;
        r_decay = {SpectralDecay::Kind::gaussian, 0.5 / (w_ * w_)};
        analytic_strip = 1e6;
    }

    cplx value(cplx z, cplx b, cplx r) const override { return f_(from_zb(z, b)) * profile(r); }

    cplx profile(cplx r) const { return std::exp(-(r - c_) * (r - c_) / (2.0 * w_ * w_)); }

    // int f(g) exp(-(r - c)^2 / 2w^2) e^{2 i r tau} dr = f(g) w sqrt(2 pi) e^{2 i c tau} e^{-2 w^2 tau^2}
    cplx r_fourier(cplx z, cplx b, double tau, const Rule&) const override {
        return f_(from_zb(z, b)) * w_ * std::sqrt(two_pi) * std::polar(std::exp(-2.0 * w_ * w_ * tau * tau), 2.0 * c_ * tau);
    }

    const GroupFunction& group_part() const { return f_; }

  private:
    GroupFunction f_;
    double c_, w_;
};

inline std::shared_ptr<const ProductSymbol> product_symbol(GroupFunction f, double center, double width) {
    return std::make_shared<ProductSymbol>(std::move(f), center, width);
}

// PS values on a grid; pairs closer than the collar are stored as NaN.
inline PsTable tabulate_ps(const Symbol& a, const Rule& r_axis, const std::vector<double>& b, const Rule& rp_axis,
                           const std::vector<double>& bp, const QuadratureSpec& q) {
    PsTable t;
    t.r = r_axis;
    t.rp = rp_axis;
    t.b = b;
    t.bp = bp;
    t.check_grid();
    t.allocate();
    const std::size_t NR = t.r.size(), NB = t.b.size(), NRP = t.rp.size(), NBP = t.bp.size();
    parallel_for(NB * NBP, [&](std::size_t jl) {
        const std::size_t j = jl / NBP, l = jl % NBP;
        const bool skip = angular_separation(t.b[j], t.bp[l]) < ps_collar;
        for (std::size_t i = 0; i < NR; ++i)
            for (std::size_t k = 0; k < NRP; ++k)
                t.at(i, j, k, l) = skip ? cplx(std::nan(""), std::nan(""))
                                        : ps_transform(a, t.r.x[i], BoundaryPoint(t.b[j]), t.rp.x[k], BoundaryPoint(t.bp[l]), q);
    });
    return t;
}

namespace detail {

inline std::size_t find_angle(const std::vector<double>& grid, double angle, const char* what) {
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (angular_separation(grid[j], angle) < 1e-12) return j;
    throw GridTooCoarse(std::string("ps_inverse: ") + what + " is not a node of the table");
}

} // namespace detail

// a(b', b, t, R) = (1/pi) e^{2iRt} |b - b'|^{1 + 2iR} int PS a(ir, b, i(2R - r), b') e^{-2irt} dr.
// b_plus and b_minus must be table nodes; the r' value 2R - r is reached by cubic interpolation.
inline cplx ps_inverse(const PsTable& PS, BoundaryPoint b_minus, BoundaryPoint b_plus, double t, double R,
                       const QuadratureSpec& q) {
    detail::check_pair(b_plus, b_minus);
    const std::size_t j = detail::find_angle(PS.b, b_plus.angle, "b");
    const std::size_t l = detail::find_angle(PS.bp, b_minus.angle, "b'");
    const std::size_t NR = PS.r.size(), NRP = PS.rp.size();
    cplx acc = 0.0;
    double vmax = 0.0, edge = 0.0, err = 0.0;
    for (std::size_t k = 0; k < NRP; ++k) vmax = std::max(vmax, std::abs(PS.at(0, j, k, l)));
    for (std::size_t i = 0; i < NR; ++i) {
        const double r = PS.r.x[i], rp = 2.0 * R - r;
        cplx v = 0.0;
        if (rp < PS.rp.x.front() || rp > PS.rp.x.back()) {
            // outside the r' axis: the integrand must already be negligible at the axis ends
            edge = std::max({edge, std::abs(PS.at(i, j, 0, l)), std::abs(PS.at(i, j, NRP - 1, l))});
        } else {
            const LocalWeights lw = cubic_weights(PS.rp.x, rp);
            cplx e = 0.0;
            for (int a = 0; a < 4; ++a) {
                const cplx x = PS.at(i, j, lw.first + a, l);
                v += lw.w[a] * x;
                e += lw.dw[a] * x;
            }
            err = std::max(err, std::abs(e));
        }
        for (std::size_t k = 0; k < NRP; ++k) vmax = std::max(vmax, std::abs(PS.at(i, j, k, l)));
        acc += PS.r.w[i] * v * std::polar(1.0, -2.0 * r * t);
    }
    if (edge > q.tol * vmax || err > q.tol * vmax)
        throw GridTooCoarse("ps_inverse: table does not cover the slice r + r' = 2R adequately");
    const double dist = std::abs(b_plus.value() - b_minus.value());
    return std::polar(1.0, 2.0 * R * t) * std::exp(cplx(1.0, 2.0 * R) * std::log(dist)) * acc / pi;
}

// Both sides of
//   ||a||^2_{L^2(G x R, dg dp)} = (1/pi) int |PS a(ir, b, ir', b')|^2 db db' ((r+r')/2) tanh(pi (r+r')/2) dr dr'.
// The left side uses the (z, b) Poisson form of the Haar measure. On the right, (r, r') is
// integrated in the rotated variables rho = (r + r')/2, sigma = r - r' (unit Jacobian), with b, b'
// on a disc_angular_nodes trapezoid grid minus the collar.
inline std::pair<double, double> ps_norm_identity(const Symbol& a, const QuadratureSpec& q) {
    q.validate();
    const Rule rho = symmetric_spectral_rule(q.r_halfwidth, q.r_nodes);
    // left side
    const DiscGrid g = make_disc_grid(q);
    const Rule bz = periodic_trapezoid(q.disc_angular_nodes, 1.0);
    const double lhs = parallel_sum<double>(g.size(), [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < bz.size(); ++j) {
            const cplx bb = std::polar(1.0, bz.x[j]);
            const std::vector<cplx> v = a.values_r(g.z[k], bb, rho.x);
            double col = 0.0;
            for (std::size_t i = 0; i < rho.size(); ++i) col += rho.w[i] * plancherel_density(rho.x[i]) * std::norm(v[i]);
            acc += bz.w[j] * poisson_kernel(g.z[k], bb) * col;
        }
        return g.w[k] * acc;
    });
    // right side
    const int nb = q.disc_angular_nodes;
    const Rule sigma = gauss_legendre(q.r_nodes, -2.0 * q.r_halfwidth, 2.0 * q.r_halfwidth);
    const double rhs = parallel_sum<double>(static_cast<std::size_t>(nb) * nb, [&](std::size_t jl) {
        const BoundaryPoint b(two_pi * static_cast<double>(jl / nb) / nb);
        const BoundaryPoint bp(two_pi * static_cast<double>(jl % nb) / nb);
        if (angular_separation(b.angle, bp.angle) < ps_collar) return 0.0;
        const GroupElement g0 = geodesic_frame(bp, b);
        const double T = detail::geodesic_window(a.decay, bp, b, q);
        const Rule tau = gauss_legendre(q.line_nodes, -T, T);
        std::vector<GroupElement> pts(tau.size());
        for (std::size_t k = 0; k < tau.size(); ++k) pts[k] = g0 * a_t(tau.x[k]);
        const double inv_d2 = 1.0 / std::norm(b.value() - bp.value());
        double acc = 0.0;
        std::vector<cplx> A(tau.size());
        for (std::size_t i = 0; i < rho.size(); ++i) {
            for (std::size_t k = 0; k < tau.size(); ++k) A[k] = tau.w[k] * a.at(pts[k], rho.x[i]);
            double col = 0.0;
            for (std::size_t m = 0; m < sigma.size(); ++m) {
                cplx s = 0.0;
                for (std::size_t k = 0; k < tau.size(); ++k) s += A[k] * std::polar(1.0, sigma.x[m] * tau.x[k]);
                col += sigma.w[m] * std::norm(s);
            }
            acc += rho.w[i] * rho.x[i] * std::tanh(pi * rho.x[i]) * col;
        }
        return acc * inv_d2 / (static_cast<double>(nb) * nb);
    });
    return {lhs, rhs / pi};
}

// pi mu0(1/2 + i(r + r')/2) PS_{(ir, b), (-ir', b')}
inline cplx ps_normalized(const Symbol& a, double r, BoundaryPoint b, double rp, BoundaryPoint bp, const QuadratureSpec& q) {
    const Mu0Value m = mu0(cplx(0.5, 0.5 * (r + rp)));
    return pi * m.value * ps_transform(a, r, b, rp, bp, q);
}

} // namespace hypharm
