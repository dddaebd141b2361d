#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace hypharm {

// Decay envelope in the distance s = d(z, o).
struct DecayClass {
    enum class Kind { compact, gaussian, exponential };
    Kind kind = Kind::gaussian;
    double param = 1.0;      // support radius, alpha, or rate p
    double amplitude = 1.0;  // constant C in |f| <= C envelope(s)

    static DecayClass compact(double radius, double c = 1.0) { return {Kind::compact, radius, c}; }
    static DecayClass gaussian(double alpha, double c = 1.0) { return {Kind::gaussian, alpha, c}; }
    static DecayClass exponential(double p, double c = 1.0) { return {Kind::exponential, p, c}; }

    double envelope(double s) const {
        switch (kind) {
        case Kind::compact: return s < param ? 1.0 : 0.0;
        case Kind::gaussian: return std::exp(-param * s * s);
        case Kind::exponential: return std::exp(-param * s);
        }
        return 0.0;
    }

    // Whether e^{c s} growth (c = 1/2 + |Im r| for plane waves) is dominated.
    bool dominates_growth(double c) const {
        if (kind == Kind::exponential) return param > c;
        return true;
    }
};

struct ScalarField {
    std::function<cplx(cplx)> f;
    DecayClass decay;

    cplx operator()(cplx z) const { return f(z); }
};

// Spot check |f(z)| <= C envelope(s) at `radii` radii in (0, s_max], with a fixed angle pattern.
inline bool check_envelope(const ScalarField& u, double s_max, int radii = 20, double slack = 1.0 + 1e-9) {
    for (int i = 1; i <= radii; ++i) {
        const double s = s_max * i / radii;
        const cplx z = std::polar(std::tanh(0.5 * s), 0.7 + 2.3 * i);
        const double bound = u.decay.amplitude * u.decay.envelope(s);
        if (std::abs(u(z)) > slack * bound + 1e-300) return false;
    }
    return true;
}

inline cplx plane_wave(cplx nu, BoundaryPoint b, cplx z) {
    return std::exp((0.5 + nu) * busemann(z, b.value()));
}
inline cplx plane_wave(cplx nu, cplx b, cplx z) { return std::exp((0.5 + nu) * busemann(z, b)); }

inline double plancherel_density(double r) { return r * std::tanh(pi * r) / two_pi; }

// 5-point estimate of the Laplace-Beltrami operator ((1-|z|^2)^2 / 4) * Euclidean Laplacian.
template <typename F>
cplx laplace_beltrami(F&& f, cplx z, double h) {
    if (std::abs(z) + 2.0 * h >= 1.0) throw StencilOutOfDisc("laplace_beltrami: stencil leaves the disc");
    const cplx c = f(z);
    const cplx lap = (f(z + h) + f(z - h) + f(z + cplx(0, h)) + f(z - cplx(0, h)) - 4.0 * c) / (h * h);
    const double fac = 1.0 - std::norm(z);
    return 0.25 * fac * fac * lap;
}

inline cplx integrate_disc(const std::function<cplx(cplx)>& f, const DiscGrid& g) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) acc += g.w[k] * f(g.z[k]);
    return acc;
}
inline cplx integrate_disc(const std::function<cplx(cplx)>& f, const QuadratureSpec& q) {
    return integrate_disc(f, make_disc_grid(q));
}

namespace detail {
inline void check_field_for_frequency(const ScalarField& u, cplx r, const QuadratureSpec& q) {
    const double c = 0.5 + std::abs(r.imag());
    if (!u.decay.dominates_growth(c))
        throw TailTooFat("declared decay does not dominate the plane-wave growth");
    if (u.decay.kind != DecayClass::Kind::compact) {
        const double S = q.disc_radius_max;
        // tail of the radial integrand ~ envelope * e^{(c + 1/2) S}
        const double tail = u.decay.amplitude * u.decay.envelope(S) * std::exp((c + 0.5) * S);
        if (tail > q.tol) throw TailTooFat("integrand tail exceeds the tolerance at the truncation radius");
    }
}
} // namespace detail

// Helgason transform with the field sampled once on a fixed disc grid.
class HelgasonTransform {
  public:
    HelgasonTransform(const ScalarField& u, const QuadratureSpec& q) : u_(u), q_(q) {
        q.validate();
        const double S = (u.decay.kind == DecayClass::Kind::compact) ? std::min(q.disc_radius_max, u.decay.param)
                                                                     : q.disc_radius_max;
        grid_ = make_disc_grid(S, q.disc_radial_nodes, q.disc_angular_nodes, q.r_halfwidth);
        vals_.resize(grid_.size());
        for (std::size_t k = 0; k < grid_.size(); ++k) vals_[k] = grid_.w[k] * u(grid_.z[k]);
    }

    // F u(b, r) = int e^{(1/2 - i r)<z, b>} u(z) Vol(dz)
    cplx operator()(BoundaryPoint b, cplx r) const {
        detail::check_field_for_frequency(u_, r, q_);
        const cplx bb = b.value();
        const cplx ex = 0.5 - cplx(0, 1) * r;
        cplx acc = 0.0;
        for (std::size_t k = 0; k < grid_.size(); ++k) acc += vals_[k] * std::exp(ex * busemann(grid_.z[k], bb));
        return acc;
    }

    // values at several frequencies for one boundary point; the Busemann values are shared
    std::vector<cplx> at_frequencies(BoundaryPoint b, const std::vector<double>& rs) const {
        for (double r : rs) detail::check_field_for_frequency(u_, r, q_);
        const cplx bb = b.value();
        std::vector<double> bus(grid_.size());
        std::vector<cplx> amp(grid_.size());
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            bus[k] = busemann(grid_.z[k], bb);
            amp[k] = vals_[k] * std::exp(0.5 * bus[k]);
        }
        std::vector<cplx> out(rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < grid_.size(); ++k) acc += amp[k] * std::polar(1.0, -rs[i] * bus[k]);
            out[i] = acc;
        }
        return out;
    }

    const DiscGrid& grid() const { return grid_; }

  private:
    ScalarField u_;
    QuadratureSpec q_;
    DiscGrid grid_;
    std::vector<cplx> vals_;
};

inline cplx helgason_fourier(const ScalarField& u, BoundaryPoint b, cplx r, const QuadratureSpec& q) {
    return HelgasonTransform(u, q)(b, r);
}

// Value plus node-doubling error estimate; throws when the estimate exceeds q.tol (relative).
inline Estimate helgason_fourier_checked(const ScalarField& u, BoundaryPoint b, cplx r, const QuadratureSpec& q) {
    const cplx v1 = helgason_fourier(u, b, r, q);
    const cplx v2 = helgason_fourier(u, b, r, q.doubled());
    const double err = std::abs(v2 - v1);
    if (err > q.tol * std::max(std::abs(v2), 1e-300) && err > 1e-14)
        throw QuadratureNotConverged("helgason_fourier: node doubling changed the value beyond tol");
    return {v2, err};
}

// Boundary x frequency grid for the inversion integral over B x R+ with db dp(r).
struct SpectralGrid {
    Rule b;  // angles, weights sum to 1
    Rule r;  // r in [0, r_max], weights include dp(r)
};

inline SpectralGrid make_spectral_grid(const QuadratureSpec& q) {
    SpectralGrid g;
    g.b = periodic_trapezoid(q.disc_angular_nodes, 1.0);
    g.r = gauss_legendre(q.r_nodes, 0.0, q.r_halfwidth);
    for (std::size_t k = 0; k < g.r.size(); ++k) g.r.w[k] *= plancherel_density(g.r.x[k]);
    return g;
}

// Values of F u on a spectral grid, row-major in (r, b).
struct HelgasonTable {
    SpectralGrid grid;
    std::vector<cplx> values;

    cplx at(std::size_t ir, std::size_t ib) const { return values[ir * grid.b.size() + ib]; }
};

inline HelgasonTable tabulate_helgason(const ScalarField& u, const QuadratureSpec& q) {
    HelgasonTable t;
    t.grid = make_spectral_grid(q);
    HelgasonTransform F(u, q);
    const std::size_t nb = t.grid.b.size(), nr = t.grid.r.size();
    t.values.resize(nb * nr);
    parallel_for(nb, [&](std::size_t ib) {
        const std::vector<cplx> col = F.at_frequencies(BoundaryPoint(t.grid.b.x[ib]), t.grid.r.x);
        for (std::size_t ir = 0; ir < nr; ++ir) t.values[ir * nb + ib] = col[ir];
    });
    return t;
}

// int_{R+} int_B Ff(b, r) e^{(1/2 + i r)<z, b>} dp(r) db
inline cplx helgason_inverse(const std::function<cplx(BoundaryPoint, double)>& Ff, cplx z, const QuadratureSpec& q) {
    q.validate();
    const SpectralGrid g = make_spectral_grid(q);
    cplx acc = 0.0;
    for (std::size_t ir = 0; ir < g.r.size(); ++ir) {
        const cplx ex(0.5, g.r.x[ir]);
        cplx row = 0.0;
        for (std::size_t ib = 0; ib < g.b.size(); ++ib) {
            const BoundaryPoint b(g.b.x[ib]);
            row += g.b.w[ib] * Ff(b, g.r.x[ir]) * std::exp(ex * busemann(z, b.value()));
        }
        acc += g.r.w[ir] * row;
    }
    return acc;
}

inline cplx helgason_inverse(const HelgasonTable& t, cplx z) {
    cplx acc = 0.0;
    const std::size_t nb = t.grid.b.size();
    std::vector<double> bus(nb);
    for (std::size_t ib = 0; ib < nb; ++ib) bus[ib] = busemann(z, std::polar(1.0, t.grid.b.x[ib]));
    for (std::size_t ir = 0; ir < t.grid.r.size(); ++ir) {
        const cplx ex(0.5, t.grid.r.x[ir]);
        cplx row = 0.0;
        for (std::size_t ib = 0; ib < nb; ++ib) row += t.grid.b.w[ib] * t.at(ir, ib) * std::exp(ex * bus[ib]);
        acc += t.grid.r.w[ir] * row;
    }
    return acc;
}

// ||F u||^2 over B x R+ with db dp(r)
inline double spectral_norm2(const HelgasonTable& t) {
    double acc = 0.0;
    for (std::size_t ir = 0; ir < t.grid.r.size(); ++ir) {
        double row = 0.0;
        for (std::size_t ib = 0; ib < t.grid.b.size(); ++ib) row += t.grid.b.w[ib] * std::norm(t.at(ir, ib));
        acc += t.grid.r.w[ir] * row;
    }
    return acc;
}

using GroupFn = std::function<cplx(const GroupElement&)>;

// int_G f dg with dg = P(z, b) Vol(dz) db.
inline cplx integrate_group_zb(const GroupFn& f, const QuadratureSpec& q) {
    q.validate();
    const DiscGrid g = make_disc_grid(q);
    const Rule b = periodic_trapezoid(q.disc_angular_nodes, 1.0);
    std::vector<cplx> rows = parallel_map<cplx>(g.size(), [&](std::size_t k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const cplx bb = std::polar(1.0, b.x[j]);
            acc += b.w[j] * poisson_kernel(g.z[k], bb) * f(from_zb(g.z[k], bb));
        }
        return g.w[k] * acc;
    });
    cplx acc = 0.0;
    for (const cplx& v : rows) acc += v;
    return acc;
}

// int_G f dg with dg = 4 pi db db' / |b - b'|^2 dt on B^(2) x R; coincident pairs are skipped.
inline cplx integrate_group_geodesic(const GroupFn& f, const QuadratureSpec& q) {
    q.validate();
    const int nb = q.disc_angular_nodes;
    const Rule t = gauss_legendre(q.line_nodes, -q.line_halfwidth, q.line_halfwidth);
    std::vector<cplx> rows = parallel_map<cplx>(static_cast<std::size_t>(nb), [&](std::size_t i) {
        cplx acc = 0.0;
        const BoundaryPoint bp(two_pi * static_cast<double>(i) / nb);
        for (int j = 0; j < nb; ++j) {
            if (static_cast<int>(i) == j) continue;
            const BoundaryPoint b(two_pi * j / nb);
            const GroupElement g0 = geodesic_frame(bp, b);
            cplx line = 0.0;
            for (std::size_t k = 0; k < t.size(); ++k) line += t.w[k] * f(g0 * a_t(t.x[k]));
            acc += line / std::norm(b.value() - bp.value());
        }
        return acc;
    });
    cplx acc = 0.0;
    for (const cplx& v : rows) acc += v;
    return 4.0 * pi * acc / (static_cast<double>(nb) * nb);
}

enum class HaarRoute { poisson, geodesic };

inline cplx integrate_group(const GroupFn& f, const QuadratureSpec& q, HaarRoute route = HaarRoute::poisson) {
    return route == HaarRoute::poisson ? integrate_group_zb(f, q) : integrate_group_geodesic(f, q);
}

} // namespace hypharm
