#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "errors.hpp"

namespace hypharm {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Unit-determinant real 2x2 matrix [[a, b], [c, d]], taken modulo sign.
struct GroupElement {
    double a = 1, b = 0, c = 0, d = 1;

    GroupElement() = default;

    GroupElement(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
        const double det = a * d - b * c;
        if (!(det > 0.0) || !std::isfinite(det))
            throw NumericalBlowup("GroupElement: determinant must be positive");
        if (std::abs(det - 1.0) > 1e-15) {
            const double s = 1.0 / std::sqrt(det);
            a *= s; b *= s; c *= s; d *= s;
        }
    }

    static GroupElement identity() { return {}; }

    // Element acting on the disc by z -> (alpha z + beta) / (conj(beta) z + conj(alpha)),
    // |alpha|^2 - |beta|^2 = 1.
    static GroupElement from_disc(cplx alpha, cplx beta) {
        return {alpha.real() + beta.real(), beta.imag() - alpha.imag(),
                beta.imag() + alpha.imag(), alpha.real() - beta.real()};
    }

    cplx alpha() const { return {0.5 * (a + d), -0.5 * (b - c)}; }
    cplx beta() const { return {0.5 * (a - d), 0.5 * (b + c)}; }

    double det() const { return a * d - b * c; }
    double norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }

    GroupElement inverse() const { return raw(d, -b, -c, a); }

    friend GroupElement operator*(const GroupElement& x, const GroupElement& y) {
        return raw(x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                   x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d);
    }

    // Largest entrywise difference to y, minimized over the sign of y.
    double distance_mod_sign(const GroupElement& y) const {
        auto m = [](double p, double q, double r, double s) {
            return std::max(std::max(std::abs(p), std::abs(q)), std::max(std::abs(r), std::abs(s)));
        };
        return std::min(m(a - y.a, b - y.b, c - y.c, d - y.d), m(a + y.a, b + y.b, c + y.c, d + y.d));
    }

    bool equals_mod_sign(const GroupElement& y, double tol = 1e-12) const {
        return distance_mod_sign(y) <= tol * std::max(1.0, norm());
    }

  private:
    static GroupElement raw(double a, double b, double c, double d) {
        GroupElement g;
        g.a = a; g.b = b; g.c = c; g.d = d;
        return g;
    }
};

struct DiscPoint {
    cplx z{0.0, 0.0};

    DiscPoint() = default;
    explicit DiscPoint(cplx v) : z(v) {
        if (!(std::norm(v) < 1.0)) throw NumericalBlowup("DiscPoint: |z| >= 1");
    }
};

struct BoundaryPoint {
    double angle = 0.0; // in [0, 2pi)

    BoundaryPoint() = default;
    explicit BoundaryPoint(double theta) : angle(wrap(theta)) {}

    static BoundaryPoint from_complex(cplx b) { return BoundaryPoint(std::arg(b)); }
    cplx value() const { return std::polar(1.0, angle); }

    static double wrap(double t) {
        double r = std::fmod(t, two_pi);
        if (r < 0) r += two_pi;
        if (r >= two_pi) r -= two_pi;
        return r;
    }
};

// Circular distance between two angles.
inline double angular_separation(double x, double y) {
    const double d = BoundaryPoint::wrap(x - y);
    return std::min(d, two_pi - d);
}

struct GeodesicCoords {
    BoundaryPoint b_minus;
    BoundaryPoint b_plus;
    double tau = 0.0;
};

struct ZbCoords {
    DiscPoint z;
    BoundaryPoint b;
};

inline constexpr double default_eps_bb = 1e-9;

// ---- one-parameter subgroups ---------------------------------------------

inline GroupElement a_t(double t) {
    const double e = std::exp(0.5 * t);
    return {e, 0.0, 0.0, 1.0 / e};
}
inline GroupElement n_u(double u) { return {1.0, u, 0.0, 1.0}; }
inline GroupElement nbar_u(double u) { return {1.0, 0.0, u, 1.0}; }
inline GroupElement k_theta(double th) {
    const double c = std::cos(th), s = std::sin(th);
    return {c, -s, s, c};
}
inline GroupElement w_elem() { return {0.0, -1.0, 1.0, 0.0}; }

// ---- actions --------------------------------------------------------------

inline cplx act(const GroupElement& g, cplx z) {
    const cplx al = g.alpha(), be = g.beta();
    return (al * z + be) / (std::conj(be) * z + std::conj(al));
}

inline DiscPoint mobius_act(const GroupElement& g, DiscPoint p) {
    const cplx w = act(g, p.z);
    if (std::abs(w) >= 1.0 - 1e-14) throw NumericalBlowup("mobius_act: image left the disc");
    return DiscPoint(w);
}

inline cplx act_boundary(const GroupElement& g, cplx b) {
    const cplx v = act(g, b);
    return v / std::abs(v);
}

inline BoundaryPoint boundary_act(const GroupElement& g, BoundaryPoint b) {
    return BoundaryPoint::from_complex(act(g, b.value()));
}

// <z, b> = log((1 - |z|^2) / |b - z|^2)
inline double busemann(cplx z, cplx b) {
    return std::log((1.0 - std::norm(z)) / std::norm(b - z));
}
inline double busemann(DiscPoint z, BoundaryPoint b) { return busemann(z.z, b.value()); }

inline double poisson_kernel(cplx z, cplx b) {
    return (1.0 - std::norm(z)) / std::norm(b - z);
}

// d/db (g.b) = exp(-<g.o, g.b>), angular derivative.
inline double boundary_derivative(const GroupElement& g, BoundaryPoint b) {
    const cplx gb = act_boundary(g, b.value());
    return std::exp(-busemann(act(g, cplx(0.0)), gb));
}

inline double dist(cplx z1, cplx z2) {
    return 2.0 * std::atanh(std::abs(z1 - z2) / std::abs(1.0 - std::conj(z1) * z2));
}
inline double dist(DiscPoint z1, DiscPoint z2) { return dist(z1.z, z2.z); }

// hyperbolic distance from the origin
inline double radius_of(cplx z) { return 2.0 * std::atanh(std::abs(z)); }

// ---- coordinates -----------------------------------------------------------

inline ZbCoords to_zb(const GroupElement& g) {
    return {DiscPoint(act(g, cplx(0.0))), BoundaryPoint::from_complex(act(g, cplx(1.0)))};
}

// The element with g.o = z and g.1 = b.
inline GroupElement from_zb(cplx z, cplx b) {
    const double s = 1.0 / std::sqrt(1.0 - std::norm(z));
    const GroupElement t = GroupElement::from_disc(cplx(s), z * s);
    const cplx pre = act(t.inverse(), b);
    return t * k_theta(0.5 * std::arg(pre));
}
inline GroupElement from_zb(const ZbCoords& c) { return from_zb(c.z.z, c.b.value()); }

inline GroupElement geodesic_frame(BoundaryPoint b_minus, BoundaryPoint b_plus,
                                   double eps_bb = default_eps_bb) {
    if (angular_separation(b_minus.angle, b_plus.angle) <= eps_bb)
        throw DegenerateGeodesic("geodesic_frame: coincident endpoints");
    const double D = BoundaryPoint::wrap(b_plus.angle - b_minus.angle);
    const double gam = 0.5 * (D - pi);
    const double s = std::atanh(std::sin(gam));
    const double phi = b_plus.angle - gam;
    return k_theta(0.5 * phi) * k_theta(0.25 * pi) * a_t(s) * k_theta(-0.25 * pi);
}

inline GeodesicCoords to_geodesic_coords(const GroupElement& g) {
    const cplx b = act_boundary(g, cplx(1.0));
    const cplx bm = act_boundary(g, cplx(-1.0));
    const double tau = busemann(act(g, cplx(0.0)), b) + std::log(0.5 * std::abs(b - bm));
    return {BoundaryPoint::from_complex(bm), BoundaryPoint::from_complex(b), tau};
}

inline GroupElement from_geodesic_coords(const GeodesicCoords& c, double eps_bb = default_eps_bb) {
    return geodesic_frame(c.b_minus, c.b_plus, eps_bb) * a_t(c.tau);
}

struct KanFactors {
    GroupElement k;
    double a_param;
    double nbar_param;
};

// n_u = k_u a_{-log(1+u^2)} nbar_{u/(1+u^2)}
inline KanFactors kan_decompose(double u) {
    const double q = 1.0 + u * u;
    const double s = 1.0 / std::sqrt(q);
    return {GroupElement(s, u * s, -u * s, s), -std::log(q), u / q};
}

inline GroupElement geodesic_flow_pt(const GroupElement& g, double t) { return g * a_t(t); }
inline GroupElement horocycle_flow_pt(const GroupElement& g, double u) { return g * n_u(u); }
inline GroupElement time_reversal(const GroupElement& g) { return g * w_elem(); }

} // namespace hypharm
