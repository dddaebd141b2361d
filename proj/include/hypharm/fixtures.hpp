#pragma once

#include <cmath>
#include <complex>
#include <memory>

#include "geometry.hpp"
#include "psradon.hpp"
#include "transforms.hpp"

// Named test functions shared by the verification suites.
namespace hypharm::fixtures {

// Smooth bump exp(1 - 1/(1 - (s/radius)^2)) on [0, radius), zero beyond; equals 1 at s = 0.
inline double smooth_bump(double s, double radius) {
    const double x = s / radius;
    if (x >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

// Compactly supported functions on G, written in the (z, b) coordinates of g.
// variant 0 is centred at o, variant 1 at a shifted point with a complex profile.
inline GroupFunction compact_function(int variant, double radius = 2.5) {
    if (variant == 0)
        return {[radius](const GroupElement& g) {
                    const ZbCoords c = to_zb(g);
                    const cplx z = c.z.z, b = c.b.value();
                    return cplx(smooth_bump(radius_of(z), radius) * (1.0 + 0.5 * (z * std::conj(b)).real()));
                },
                DecayClass::compact(radius)};
    const cplx center(0.25, -0.1);
    const double reach = radius + radius_of(center);
    return {[radius, center](const GroupElement& g) {
                const ZbCoords c = to_zb(g);
                const cplx z = c.z.z, b = c.b.value();
                return smooth_bump(dist(z, center), radius) * (cplx(0.8, 0.2) + 0.3 * (b * b)) * (1.0 + 0.4 * z.imag());
            },
            DecayClass::compact(reach)};
}

// exp(-alpha d(g.o, o)^2) (1 + 0.3 Re(z conj b)), a Gaussian function on G.
inline GroupFunction gaussian_function(double alpha) {
    return {[alpha](const GroupElement& g) {
                const ZbCoords c = to_zb(g);
                const cplx z = c.z.z, b = c.b.value();
                const double s = radius_of(z);
                return cplx(std::exp(-alpha * s * s) * (1.0 + 0.3 * (z * std::conj(b)).real()));
            },
            DecayClass::gaussian(alpha, 1.0 + 0.3)};
}

// exp(-alpha s^2) (1 + 0.5 Re z + 0.2i Im z^2) on the disc.
inline ScalarField gaussian_field(double alpha = 1.0) {
    return {[alpha](cplx z) {
                const double s = radius_of(z);
                return std::exp(-alpha * s * s) * (1.0 + 0.5 * z.real() + cplx(0, 0.2) * (z * z).imag());
            },
            DecayClass::gaussian(alpha, 1.7)};
}

// Bump of the given radius times (1 + 0.4 Im z^2) on the disc.
inline ScalarField bump_field(double radius = 3.0) {
    return {[radius](cplx z) { return smooth_bump(radius_of(z), radius) * (1.0 + 0.4 * (z * z).imag()); },
            DecayClass::compact(radius, 1.4)};
}

// Real test functions on G for the two Haar parametrizations: a Gaussian, a bump of radius 2
// and a sech^4 profile, each with boundary dependence.
inline GroupFunction haar_test_function(int which) {
    return {[which](const GroupElement& g) {
                const ZbCoords c = to_zb(g);
                const double s = radius_of(c.z.z), th = c.b.angle;
                const cplx z = c.z.z;
                if (which == 0) return cplx(std::exp(-s * s) * (1.0 + 0.5 * std::cos(th - 0.3) + 0.2 * z.imag()));
                if (which == 1) return cplx(smooth_bump(s, 2.0) * (1.2 + std::sin(2 * th)));
                const double h = 1.0 / std::cosh(s);
                return cplx(h * h * h * h * (1.0 + 0.3 * std::cos(th) * z.real()));
            },
            which == 0 ? DecayClass::gaussian(1.0, 1.7) : (which == 1 ? DecayClass::compact(2.0, 2.2) : DecayClass::exponential(4.0, 21.0))};
}

// Gaussian product symbol f(g) exp(-(r - center)^2 / (2 width^2)).
inline std::shared_ptr<const ProductSymbol> gaussian_product_symbol(double alpha, double center, double width) {
    return product_symbol(gaussian_function(alpha), center, width);
}

} // namespace hypharm::fixtures
