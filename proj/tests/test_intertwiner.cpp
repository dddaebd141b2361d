#include <gtest/gtest.h>

#include <random>

#include "hypharm/fixtures.hpp"
#include "hypharm/harmonic.hpp"
#include "hypharm/intertwiner.hpp"

using namespace hypharm;

namespace {

std::shared_ptr<const HarmonicModel> model() {
    static const auto m = make_harmonic_model(default_harmonic_modes());
    return m;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

QuadratureSpec line_spec() {
    QuadratureSpec q;
    q.line_halfwidth = 12.0;
    q.line_nodes = 256;
    q.r_halfwidth = 20.0;
    q.r_nodes = 256;
    return q;
}

QuadratureSpec disc_spec() {
    QuadratureSpec q;
    q.disc_radius_max = 6.0;
    q.disc_radial_nodes = 96;
    q.disc_angular_nodes = 64;
    q.r_halfwidth = 16.0;
    q.r_nodes = 128;
    return q;
}

GroupElement probe(double radius, double zarg, double barg) {
    return from_zb(std::polar(radius, zarg), std::polar(1.0, barg));
}

} // namespace

TEST(LNu, ConstantAtOneHalfIsPi) {
    const GroupFunction one{[](const GroupElement&) { return cplx(1.0); }, DecayClass::exponential(0.0)};
    for (const GroupElement& g : {GroupElement(), probe(0.4, 1.0, 2.0)})
        EXPECT_LT(std::abs(l_nu(one, 0.5, g, QuadratureSpec{}) - pi), 1e-7);
}

TEST(LNu, SlowDecayIsRefused) {
    const GroupFunction one{[](const GroupElement&) { return cplx(1.0); }, DecayClass::exponential(0.0)};
    EXPECT_THROW(l_nu(one, cplx(0.0, 2.0), GroupElement(), QuadratureSpec{}), TailTooFat);
}

TEST(LNu, PairingWithPsEqualsWigner) {
    const QuadratureSpec q;
    for (int variant : {0, 1}) {
        const GroupFunction f = fixtures::compact_function(variant);
        const auto a = make_symbol([f](cplx z, cplx b, cplx) { return f(from_zb(z, b)); }, SymbolTraits{f.decay, {}});
        for (double r : {0.5, 3.0})
            for (double rp : {1.0, 2.5}) {
                const BoundaryPoint b(0.3 + 0.7 * r), bp(3.9 + 0.5 * rp);
                const cplx lhs = lpsw_pairing(f, r, b, rp, bp, q);
                const cplx rhs = wigner_transform(*a, r, b, rp, bp, q);
                EXPECT_LT(rel(lhs, rhs), 1e-3) << "variant " << variant << " r=" << r << " r'=" << rp;
            }
    }
}

TEST(LNu, StationaryPhaseRateAndConstant) {
    const QuadratureSpec q;
    const GroupFunction f = fixtures::gaussian_function(1.0);
    const GroupElement g = probe(0.2, 1.1, 0.7);
    const cplx a0 = f(g);
    std::vector<double> rs{8, 16, 32, 64}, err;
    for (double r : rs) {
        const cplx L = l_nu(f, cplx(0.0, r), g, q);
        err.push_back(std::abs(std::sqrt(r / pi) * std::polar(1.0, pi / 4) * L - a0) / std::abs(a0));
    }
    const double slope = loglog_slope(rs, err);
    EXPECT_GE(slope, -1.3);
    EXPECT_LE(slope, -0.7);
    const cplx L64 = l_nu(f, cplx(0.0, 64.0), g, q) / a0;
    const cplx lead = std::sqrt(pi / 64.0) * std::polar(1.0, -pi / 4);
    EXPECT_LT(std::abs(L64 - lead) / std::abs(lead), 0.02);
}

TEST(LApply, DirectMatchesSpectral) {
    const auto a = harmonic_symbol(model());
    const QuadratureSpec q = line_spec();
    for (auto [g, R] : std::vector<std::pair<GroupElement, double>>{
             {probe(0.1, 0.3, 2.0), 1.5}, {probe(0.25, 2.0, 5.0), 3.2}, {probe(0.0, 0.0, 1.0), 5.5}}) {
        EXPECT_LT(rel(l_apply_direct(*a, g, R, q), l_apply_spectral(*a, g, R, q)), 1e-3) << "R=" << R;
    }
}

TEST(LApply, SpectralFromTableMatchesClosedForm) {
    const auto a = harmonic_symbol(model());
    Rule rp;
    for (int k = 0; k <= 320; ++k) {
        rp.x.push_back(-16.0 + 0.1 * k);
        rp.w.push_back(0.1);
    }
    const WignerTable W = tabulate_wigner(*a, gauss_legendre(128, -16.0, 16.0), 12, rp, 12, disc_spec());
    const QuadratureSpec q = line_spec();
    for (auto [g, R] : std::vector<std::pair<GroupElement, double>>{{probe(0.1, 0.3, 2.0), 1.5}, {probe(0.3, 2.0, 5.0), 3.2}})
        EXPECT_LT(rel(l_apply_spectral(W, g, R), l_apply_spectral(*a, g, R, q)), 1e-3) << "R=" << R;
}

TEST(LApply, PsOfLEqualsWigner) {
    const auto a = harmonic_symbol(model());
    QuadratureSpec qs = line_spec();
    const LTransformed La(a, qs);
    QuadratureSpec q;
    q.line_halfwidth = 20.0;
    q.line_nodes = 320;
    for (auto [r, b, rp, bp] : std::vector<std::tuple<double, double, double, double>>{{1.0, 0.3, 2.0, 2.5}, {3.5, 2.0, 1.0, 5.0}}) {
        const cplx ps = ps_transform(La, r, BoundaryPoint(b), rp, BoundaryPoint(bp), q);
        const cplx w = *a->wigner_exact(r, std::polar(1.0, b), rp, std::polar(1.0, bp));
        EXPECT_LT(rel(ps, w), 1e-3) << r << " " << rp;
    }
}

TEST(LApply, PrefactorConventions) {
    const auto a = harmonic_symbol(model());
    const QuadratureSpec q = line_spec();
    const GroupElement g = probe(0.2, 1.0, 2.0);
    const double R = 2.0;
    const cplx direct = l_apply_direct(*a, g, R, q);
    const cplx pre = std::exp(cplx(1.0, 2.0 * R) * std::log(2.0)) / pi;
    EXPECT_LT(rel(l_apply_unscaled(*a, g, R, q) * pre, direct), 1e-12);
    EXPECT_LT(rel(l_normalized(*a, g, R, q) * l_normalizer(R), direct), 1e-12);
    EXPECT_LT(rel(l_normalizer(R), pre * pi * mu0(cplx(0.5, R)).value), 1e-12);
    EXPECT_THROW(l_normalized(*a, g, 0.0, q), Mu0Pole);
}

TEST(LApply, ZeroSymbolAndStrip) {
    const auto zero = make_symbol([](cplx, cplx, cplx) { return cplx(0.0); }, SymbolTraits{DecayClass::compact(1.0), {}});
    const QuadratureSpec q = line_spec();
    EXPECT_EQ(std::abs(l_apply_direct(*zero, probe(0.1, 0.0, 1.0), 2.0, q)), 0.0);
    EXPECT_EQ(std::abs(l_apply_spectral(*zero, probe(0.1, 0.0, 1.0), 2.0, q)), 0.0);
    const auto a = harmonic_symbol(model());
    EXPECT_THROW(l_apply_direct(*a, GroupElement(), cplx(2.0, 0.3), q), AnalyticStripExceeded);
}

TEST(LNormalized, SemiclassicalLimit) {
    QuadratureSpec q;
    q.r_nodes = 64;
    const GroupElement g = probe(0.2, 1.1, 0.7);
    std::vector<double> Rs{4, 8, 16}, err;
    for (double R : Rs) {
        const auto a = fixtures::gaussian_product_symbol(1.0, R, 0.25 * R);
        err.push_back(std::abs(l_normalized(*a, g, R, q) - a->at(g, R)) / std::abs(a->at(g, R)));
    }
    EXPECT_GT(err[0], err[1]);
    EXPECT_GT(err[1], err[2]);
    EXPECT_LE(loglog_slope(Rs, err), -0.7);
}

TEST(SchrodingerEvolve, TimeZeroIsIdentity) {
    const auto a = harmonic_symbol(model());
    const QuadratureSpec q = disc_spec();
    const auto e0 = schrodinger_evolve(a, 0.0, q);
    const auto w0 = schrodinger_evolve(a, 0.0, q, EvolvedSymbol::Route::wigner);
    EXPECT_TRUE(e0->closed_form());
    EXPECT_FALSE(w0->closed_form());
    for (auto [z, bang, r] : std::vector<std::tuple<cplx, double, double>>{{cplx(0.1, 0.2), 0.3, 1.0}, {cplx(-0.3, 0.1), 2.0, 3.5}}) {
        const cplx b = std::polar(1.0, bang);
        EXPECT_LT(rel(e0->value(z, b, r), a->value(z, b, r)), 1e-12);
        EXPECT_LT(rel(w0->value(z, b, r), a->value(z, b, r)), 1e-6);
    }
}

TEST(SchrodingerEvolve, GroupLawThroughWignerRoute) {
    const auto a = harmonic_symbol(model());
    const QuadratureSpec q = disc_spec();
    const auto e1 = schrodinger_evolve(a, 0.4, q);
    const auto e12 = schrodinger_evolve(e1, 0.6, q, EvolvedSymbol::Route::wigner);
    const auto e2 = harmonic_symbol(model(), 1.0);
    for (auto [z, bang, r] : std::vector<std::tuple<cplx, double, double>>{{cplx(0.1, 0.2), 0.3, 1.0}, {cplx(-0.3, 0.1), 2.0, 3.5}}) {
        const cplx b = std::polar(1.0, bang);
        EXPECT_LT(rel(e12->value(z, b, r), e2->value(z, b, r)), 1e-3);
    }
}

TEST(SchrodingerEvolve, PreservesHsNorm) {
    const auto a = harmonic_symbol(model());
    QuadratureSpec q = disc_spec();
    q.disc_radius_max = 9.0;
    const double n0 = hs_norm(*a, q);
    for (double t : {0.5, 1.0}) EXPECT_LT(std::abs(hs_norm(*schrodinger_evolve(a, t, q), q) - n0) / n0, 1e-3);
}

TEST(SchrodingerEvolve, RequiresWeylSymmetry) {
    const auto a = fixtures::gaussian_product_symbol(1.0, 2.0, 1.0);
    EXPECT_THROW(schrodinger_evolve(a, 0.5, QuadratureSpec{}), Error);
}

TEST(GeodesicEvolve, FlowProperties) {
    const FlowFunction f = [](const GroupElement& g, double R) {
        const ZbCoords c = to_zb(g);
        return c.z.z * std::exp(cplx(0.0, R) * c.b.angle);
    };
    const GroupElement g = probe(0.3, 0.5, 1.5);
    EXPECT_EQ(geodesic_evolve(f, 0.0)(g, 2.0), f(g, 2.0));
    EXPECT_LT(std::abs(geodesic_evolve(f, 1.3)(g, 0.0) - f(g, 0.0)), 1e-14);
    const cplx two_step = geodesic_evolve(geodesic_evolve(f, 0.4), 0.7)(g, 1.5);
    EXPECT_LT(std::abs(two_step - geodesic_evolve(f, 1.1)(g, 1.5)), 1e-12);
    EXPECT_LT(std::abs(geodesic_evolve(f, 0.5)(g, 2.0) - f(g * a_t(1.0), 2.0)), 1e-14);
}

TEST(Intertwining, ResidualsAtTwoProbes) {
    const auto a = harmonic_symbol(model());
    const QuadratureSpec q = line_spec();
    const double t = 0.5;
    const std::vector<IntertwiningProbe> probes{{probe(0.2, 0.4, 1.0) * a_t(-2.0 * t), 2.0}, {probe(0.1, 3.0, 4.0) * a_t(-4.5 * t), 4.5}};
    const auto rows = verify_intertwining(a, t, probes, q);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& row : rows) EXPECT_LT(row.rel_residual, 1e-3) << row.identity_name << " " << row.probe_id;
}

TEST(Intertwining, TimeZeroResidualIsQuadratureNoise) {
    const auto a = harmonic_symbol(model());
    const QuadratureSpec q = line_spec();
    const auto rows = verify_intertwining(a, 0.0, {{probe(0.2, 0.4, 1.0), 2.5}}, q);
    EXPECT_LT(rows[0].rel_residual, 1e-12);
}

TEST(Intertwining, EigenRouteOnPsSide) {
    const auto a = harmonic_symbol(model());
    const double t = 0.7;
    const auto at = schrodinger_evolve(a, t, disc_spec());
    const QuadratureSpec qs = line_spec();
    const LTransformed La(a, qs), Lat(at, qs);
    QuadratureSpec q;
    q.line_halfwidth = 20.0;
    q.line_nodes = 320;
    const double r = 2.0, rp = 1.2;
    const BoundaryPoint b(0.5), bp(3.5);
    const cplx lhs = ps_transform(Lat, r, b, rp, bp, q);
    const cplx rhs = std::polar(1.0, -0.5 * (r * r - rp * rp) * t) * ps_transform(La, r, b, rp, bp, q);
    EXPECT_LT(rel(lhs, rhs), 1e-3);
}

TEST(LInverse, RoundTrip) {
    const auto a = harmonic_symbol(model());
    QuadratureSpec qs;
    qs.r_halfwidth = 14.0;
    qs.r_nodes = 48;
    const auto La = std::make_shared<LTransformed>(a, qs);
    QuadratureSpec q;
    q.line_halfwidth = 7.0;
    q.line_nodes = 32;
    q.r_halfwidth = 12.0;
    q.r_nodes = 24;
    const GroupElement g = probe(0.2, 2.0, 0.6);
    const double R = 3.0;
    EXPECT_LT(rel(l_inverse(*La, g, R, q), a->at(g, R)), 5e-2);
}

TEST(LInverse, ZeroSymbol) {
    const auto zero = make_symbol([](cplx, cplx, cplx) { return cplx(0.0); }, SymbolTraits{DecayClass::compact(1.0), {}});
    QuadratureSpec q;
    q.line_halfwidth = 4.0;
    q.line_nodes = 16;
    q.r_nodes = 16;
    EXPECT_EQ(std::abs(l_inverse(*zero, GroupElement(), 2.0, q)), 0.0);
}
