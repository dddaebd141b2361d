#include <gtest/gtest.h>

#include <random>

#include "hypharm/geometry.hpp"

using namespace hypharm;

namespace {

std::mt19937_64 rng(20240611);

double unif(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// random element with Frobenius-type size bounded through the a_t factor
GroupElement random_g(double tmax = 4.0) {
    return k_theta(unif(0, pi)) * a_t(unif(-tmax, tmax)) * k_theta(unif(0, pi));
}

cplx random_z(double smax = 3.0) { return std::polar(std::tanh(0.5 * unif(0, smax)), unif(0, two_pi)); }
BoundaryPoint random_b() { return BoundaryPoint(unif(0, two_pi)); }

// metric length of the segment [0, x] on the real axis, ds = 2|dz| / (1 - |z|^2), by Simpson's rule
double metric_length(double x) {
    const int n = 20000;
    const double h = x / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double y = i * h;
        const double f = 2.0 / (1.0 - y * y);
        acc += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * f;
    }
    return acc * h / 3.0;
}

GroupElement matmul(const GroupElement& x, const GroupElement& y) {
    // independent oracle: explicit index loop
    const double X[2][2] = {{x.a, x.b}, {x.c, x.d}}, Y[2][2] = {{y.a, y.b}, {y.c, y.d}};
    double Z[2][2] = {};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) Z[i][j] += X[i][k] * Y[k][j];
    return {Z[0][0], Z[0][1], Z[1][0], Z[1][1]};
}

} // namespace

TEST(GroupElement, RenormalizesDeterminant) {
    GroupElement g(2.0, 1.0, 1.0, 2.0);
    EXPECT_NEAR(g.det(), 1.0, 1e-12);
    EXPECT_THROW(GroupElement(1.0, 2.0, 2.0, 1.0), NumericalBlowup);
}

TEST(GroupElement, EqualityModuloSign) {
    const GroupElement g = random_g();
    const GroupElement minus(-g.a, -g.b, -g.c, -g.d);
    EXPECT_TRUE(g.equals_mod_sign(minus));
    EXPECT_FALSE(g.equals_mod_sign(g * a_t(0.1)));
}

TEST(MobiusAct, IdentityFixesOrigin) {
    EXPECT_EQ(mobius_act(GroupElement::identity(), DiscPoint()).z, cplx(0.0));
}

TEST(MobiusAct, TranslationMovesOriginByDistanceT) {
    for (double t : {0.3, 1.0, 2.5}) {
        const cplx z = mobius_act(a_t(t), DiscPoint()).z;
        EXPECT_NEAR(z.imag(), 0.0, 1e-15);
        EXPECT_NEAR(z.real(), std::tanh(t / 2), 1e-14);
        EXPECT_NEAR(metric_length(z.real()), t, 1e-9);
    }
}

TEST(MobiusAct, Homomorphism) {
    for (int i = 0; i < 100; ++i) {
        const GroupElement g = random_g(2.0), h = random_g(2.0);
        const cplx z = random_z();
        const cplx lhs = mobius_act(matmul(g, h), DiscPoint(z)).z;
        const cplx rhs = mobius_act(g, mobius_act(h, DiscPoint(z))).z;
        EXPECT_LT(std::abs(lhs - rhs), 1e-12);
    }
}

TEST(MobiusAct, ProductMatchesOracle) {
    for (int i = 0; i < 100; ++i) {
        const GroupElement g = random_g(), h = random_g();
        EXPECT_TRUE((g * h).equals_mod_sign(matmul(g, h), 1e-13));
    }
}

TEST(BoundaryAct, Identity) {
    const BoundaryPoint b(1.234);
    EXPECT_NEAR(boundary_act(GroupElement::identity(), b).angle, 1.234, 1e-15);
}

TEST(BoundaryAct, RotationDoublesAngle) {
    for (double th : {0.1, 0.7, 1.3, 2.9}) {
        const cplx v = boundary_act(k_theta(th), BoundaryPoint(0.0)).value();
        EXPECT_LT(std::abs(v - std::polar(1.0, 2 * th)), 1e-14);
    }
}

TEST(BoundaryAct, TranslationAttractsToOne) {
    for (double ang : {0.5, 2.0, 3.0, 4.5}) {
        const cplx v = boundary_act(a_t(30.0), BoundaryPoint(ang)).value();
        EXPECT_LT(std::abs(v - 1.0), 1e-9);
    }
}

TEST(Busemann, OriginIsZero) {
    EXPECT_EQ(busemann(cplx(0.0), std::polar(1.0, 0.4)), 0.0);
}

TEST(Busemann, AlongTheRadius) {
    for (double t : {0.5, 1.5, 4.0}) {
        EXPECT_NEAR(busemann(cplx(std::tanh(t / 2)), cplx(1.0)), t, 1e-12);
        EXPECT_NEAR(busemann(act(a_t(t), cplx(0.0)), cplx(1.0)), t, 1e-12);
    }
}

TEST(Busemann, Cocycle) {
    for (int i = 0; i < 1000; ++i) {
        const GroupElement g = random_g(4.5);  // ||g|| <= 10
        ASSERT_LE(g.norm(), 10.0 * std::sqrt(2.0));
        const cplx z = random_z();
        const cplx b = random_b().value();
        const double lhs = busemann(act(g, z), act_boundary(g, b));
        const double rhs = busemann(z, b) + busemann(act(g, cplx(0.0)), act_boundary(g, b));
        EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(Busemann, BasicIdentity) {
    for (int i = 0; i < 200; ++i) {
        const GroupElement g = random_g();
        const cplx b1 = random_b().value(), b2 = random_b().value();
        const cplx gb1 = act_boundary(g, b1), gb2 = act_boundary(g, b2);
        const cplx o = act(g, cplx(0.0));
        const double lhs = std::norm(gb1 - gb2) * std::exp(busemann(o, gb1) + busemann(o, gb2));
        EXPECT_NEAR(lhs, std::norm(b1 - b2), 1e-9 * std::max(1.0, std::norm(b1 - b2)));
    }
}

TEST(BoundaryDerivative, IdentityIsOne) {
    EXPECT_NEAR(boundary_derivative(GroupElement::identity(), BoundaryPoint(2.0)), 1.0, 1e-15);
}

TEST(BoundaryDerivative, TranslationAtOne) {
    for (double t : {0.2, 1.0, 3.0}) EXPECT_NEAR(boundary_derivative(a_t(t), BoundaryPoint(0.0)), std::exp(-t), 1e-12);
}

TEST(BoundaryDerivative, FiniteDifference) {
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const GroupElement g = random_g(3.0);
        const double ang = unif(0, two_pi);
        const double up = std::arg(act(g, std::polar(1.0, ang + h)));
        const double dn = std::arg(act(g, std::polar(1.0, ang - h)));
        double diff = up - dn;
        if (diff > pi) diff -= two_pi;
        if (diff < -pi) diff += two_pi;
        const double fd = diff / (2 * h);
        const double an = boundary_derivative(g, BoundaryPoint(ang));
        EXPECT_NEAR(fd, an, 1e-6 * std::max(1.0, an));
    }
}

TEST(GeodesicFrame, StandardPairIsIdentity) {
    const GroupElement g = geodesic_frame(BoundaryPoint(pi), BoundaryPoint(0.0));
    EXPECT_TRUE(g.equals_mod_sign(GroupElement::identity(), 1e-14));
}

TEST(GeodesicFrame, DefiningConditions) {
    for (int i = 0; i < 200; ++i) {
        const BoundaryPoint bm = random_b(), bp = random_b();
        if (angular_separation(bm.angle, bp.angle) < 1e-3) continue;
        const GroupElement g = geodesic_frame(bm, bp);
        EXPECT_LT(std::abs(act_boundary(g, 1.0) - bp.value()), 1e-12);
        EXPECT_LT(std::abs(act_boundary(g, -1.0) - bm.value()), 1e-12);
        const cplx o = act(g, cplx(0.0));
        // equidistance from both endpoints' horocycles
        EXPECT_NEAR(busemann(o, bp.value()), busemann(o, bm.value()), 1e-9);
        // closest point: the value <g.o, b> = -log(|b - b'| / 2)
        EXPECT_NEAR(busemann(o, bp.value()), -std::log(0.5 * std::abs(bp.value() - bm.value())), 1e-9);
        // closest point of the geodesic to o, checked against neighbours along the flow
        const double d0 = radius_of(o);
        EXPECT_LE(d0, radius_of(act(g * a_t(1e-3), cplx(0.0))) + 1e-12);
        EXPECT_LE(d0, radius_of(act(g * a_t(-1e-3), cplx(0.0))) + 1e-12);
    }
}

TEST(GeodesicFrame, DegenerateThrows) {
    EXPECT_THROW(geodesic_frame(BoundaryPoint(1.0), BoundaryPoint(1.0)), DegenerateGeodesic);
    EXPECT_THROW(geodesic_frame(BoundaryPoint(1.0), BoundaryPoint(1.0 + 1e-10)), DegenerateGeodesic);
    EXPECT_NO_THROW(geodesic_frame(BoundaryPoint(1.0), BoundaryPoint(1.0 + 1e-6)));
}

TEST(GeodesicCoords, IdentityCoordinates) {
    const GeodesicCoords c = to_geodesic_coords(GroupElement::identity());
    EXPECT_NEAR(c.b_minus.angle, pi, 1e-14);
    EXPECT_NEAR(angular_separation(c.b_plus.angle, 0.0), 0.0, 1e-14);
    EXPECT_NEAR(c.tau, 0.0, 1e-14);
}

TEST(GeodesicCoords, HorocycleThenFlow) {
    for (int i = 0; i < 100; ++i) {
        const double u = unif(-5, 5), t = unif(-3, 3);
        const GeodesicCoords c = to_geodesic_coords(n_u(u) * a_t(t));
        const cplx eith = cplx(u, 1.0) / std::sqrt(1 + u * u);
        EXPECT_LT(std::abs(c.b_minus.value() - eith * eith), 1e-12);
        EXPECT_LT(std::abs(c.b_plus.value() - 1.0), 1e-12);
        EXPECT_NEAR(c.tau, t - 0.5 * std::log(1 + u * u), 1e-9);
    }
}

TEST(GeodesicCoords, RoundTrip) {
    for (int i = 0; i < 1000; ++i) {
        const GroupElement g = random_g();
        const GroupElement h = from_geodesic_coords(to_geodesic_coords(g));
        EXPECT_TRUE(g.equals_mod_sign(h, 1e-9));
        GeodesicCoords c{random_b(), random_b(), unif(-3, 3)};
        if (angular_separation(c.b_minus.angle, c.b_plus.angle) < 1e-3) continue;
        const GeodesicCoords d = to_geodesic_coords(from_geodesic_coords(c));
        EXPECT_LT(angular_separation(c.b_minus.angle, d.b_minus.angle), 1e-9);
        EXPECT_LT(angular_separation(c.b_plus.angle, d.b_plus.angle), 1e-9);
        EXPECT_NEAR(c.tau, d.tau, 1e-9);
    }
}

TEST(GeodesicCoords, FlowShiftsTau) {
    for (int i = 0; i < 100; ++i) {
        const GroupElement g = random_g();
        const double s = unif(-2, 2);
        const GeodesicCoords c = to_geodesic_coords(g), d = to_geodesic_coords(geodesic_flow_pt(g, s));
        EXPECT_LT(angular_separation(c.b_minus.angle, d.b_minus.angle), 1e-10);
        EXPECT_LT(angular_separation(c.b_plus.angle, d.b_plus.angle), 1e-10);
        EXPECT_NEAR(d.tau, c.tau + s, 1e-9);
    }
}

TEST(GeodesicCoords, BoundaryDistanceIdentity) {
    for (int i = 0; i < 1000; ++i) {
        const BoundaryPoint bm = random_b(), bp = random_b();
        if (angular_separation(bm.angle, bp.angle) < 1e-3) continue;
        const double tau = unif(-3, 3), u = unif(-5, 5);
        const GroupElement g = geodesic_frame(bm, bp) * a_t(tau) * n_u(u);
        const double lhs = std::log(0.5 * std::abs(bp.value() - bm.value())) + busemann(act(g, cplx(0.0)), bp.value());
        EXPECT_NEAR(lhs, tau, 1e-9);
    }
}

TEST(GeodesicCoords, EndpointDensityUnderHorocycle) {
    // |b' - b|^2 = 4 / (1 + u^2) and db' = (1/pi) du / (1 + u^2) for n_u, with db normalized
    const double h = 1e-5;
    for (double u : {-3.0, -0.5, 0.0, 0.8, 4.0}) {
        auto bm = [](double v) { return to_geodesic_coords(n_u(v)).b_minus.value(); };
        EXPECT_NEAR(std::norm(bm(u) - 1.0), 4.0 / (1 + u * u), 1e-12);
        double da = std::abs(std::arg(bm(u + h) / bm(u - h))) / (2 * h);
        EXPECT_NEAR(da / two_pi, 1.0 / (pi * (1 + u * u)), 1e-8);
    }
}

TEST(Kan, Zero) {
    const KanFactors f = kan_decompose(0.0);
    EXPECT_TRUE(f.k.equals_mod_sign(GroupElement::identity(), 1e-15));
    EXPECT_EQ(f.a_param, 0.0);
    EXPECT_EQ(f.nbar_param, 0.0);
}

TEST(Kan, UnitParameter) {
    const KanFactors f = kan_decompose(1.0);
    const double s = 1 / std::sqrt(2.0);
    EXPECT_TRUE(f.k.equals_mod_sign(GroupElement(s, s, -s, s), 1e-15));
    EXPECT_NEAR(f.a_param, -std::log(2.0), 1e-15);
    EXPECT_NEAR(f.nbar_param, 0.5, 1e-15);
}

TEST(Kan, Recomposition) {
    for (int i = 0; i < 1000; ++i) {
        const double u = unif(-10, 10);
        const KanFactors f = kan_decompose(u);
        const GroupElement p = matmul(matmul(f.k, a_t(f.a_param)), nbar_u(f.nbar_param));
        const GroupElement n = n_u(u);
        EXPECT_NEAR(p.a, n.a, 1e-12);
        EXPECT_NEAR(p.b, n.b, 1e-12);
        EXPECT_NEAR(p.c, n.c, 1e-12);
        EXPECT_NEAR(p.d, n.d, 1e-12);
    }
}

TEST(Flows, ZeroTimeAndInvolution) {
    const GroupElement g = random_g();
    EXPECT_TRUE(geodesic_flow_pt(g, 0.0).equals_mod_sign(g, 1e-15));
    EXPECT_TRUE(time_reversal(time_reversal(g)).equals_mod_sign(g, 1e-15));
}

TEST(Flows, FlowProperty) {
    for (int i = 0; i < 100; ++i) {
        const GroupElement g = random_g();
        const double s = unif(-2, 2), t = unif(-2, 2);
        EXPECT_TRUE(geodesic_flow_pt(g, s + t).equals_mod_sign(geodesic_flow_pt(geodesic_flow_pt(g, s), t), 1e-12));
        EXPECT_TRUE(horocycle_flow_pt(g, s + t).equals_mod_sign(horocycle_flow_pt(horocycle_flow_pt(g, s), t), 1e-12));
    }
}

TEST(Flows, TimeReversalSwapsEndpoints) {
    for (int i = 0; i < 100; ++i) {
        const GroupElement g = random_g();
        const GeodesicCoords c = to_geodesic_coords(g), d = to_geodesic_coords(time_reversal(g));
        EXPECT_LT(angular_separation(c.b_minus.angle, d.b_plus.angle), 1e-10);
        EXPECT_LT(angular_separation(c.b_plus.angle, d.b_minus.angle), 1e-10);
        EXPECT_NEAR(d.tau, -c.tau, 1e-9);
    }
}

TEST(Dist, Basics) {
    const cplx z = random_z();
    EXPECT_NEAR(dist(z, z), 0.0, 1e-15);
    for (double t : {0.4, 2.0}) EXPECT_NEAR(dist(cplx(0.0), cplx(std::tanh(t / 2))), t, 1e-12);
}

TEST(Dist, Invariance) {
    for (int i = 0; i < 100; ++i) {
        const GroupElement g = random_g(2.0);
        const cplx z1 = random_z(), z2 = random_z();
        EXPECT_NEAR(dist(act(g, z1), act(g, z2)), dist(z1, z2), 1e-9);
        EXPECT_NEAR(dist(z1, z2), dist(z2, z1), 1e-12);
        const cplx z3 = random_z();
        EXPECT_LE(dist(z1, z3), dist(z1, z2) + dist(z2, z3) + 1e-12);
    }
}

TEST(Dist, HorocycleBasepointDistance) {
    // basepoint of a_{tau - log(1+u^2)/2} n_u: cosh d = cosh(tau) sqrt(1 + u^2),
    // hence cosh d >= (1/2) sqrt(1+u^2) e^{|tau|}
    for (double u = -6; u <= 6; u += 0.5) {
        for (double tau = -4; tau <= 4; tau += 0.5) {
            const cplx z = act(a_t(tau - 0.5 * std::log(1 + u * u)) * n_u(u), cplx(0.0));
            const double c = std::cosh(radius_of(z));
            EXPECT_NEAR(c, std::cosh(tau) * std::sqrt(1 + u * u), 1e-9 * c);
            EXPECT_GE(c, 0.5 * std::sqrt(1 + u * u) * std::exp(std::abs(tau)) * (1 - 1e-12));
        }
    }
}

TEST(ZbCoords, RoundTrip) {
    for (int i = 0; i < 200; ++i) {
        const GroupElement g = random_g();
        const ZbCoords c = to_zb(g);
        EXPECT_TRUE(from_zb(c).equals_mod_sign(g, 1e-9));
    }
}
