#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "hypharm/harmonic.hpp"
#include "hypharm/quantization.hpp"
#include "hypharm/spectral_table.hpp"

using namespace hypharm;

namespace {

std::shared_ptr<const HarmonicModel> model() {
    static const auto m = make_harmonic_model(default_harmonic_modes());
    return m;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

QuadratureSpec disc_spec() {
    QuadratureSpec q;
    q.disc_radius_max = 6.0;
    q.disc_radial_nodes = 96;
    q.disc_angular_nodes = 64;
    q.r_halfwidth = 16.0;
    q.r_nodes = 128;
    return q;
}

ScalarField gaussian_field() {
    return {[](cplx z) {
                const double s = radius_of(z);
                return std::exp(-s * s) * (1.0 + 0.5 * z.real() + cplx(0, 0.2) * (z * z).imag());
            },
            DecayClass::gaussian(1.0, 1.7)};
}

const std::vector<std::tuple<cplx, double, double>> symbol_probes = {
    {cplx(0.1, 0.2), 0.3, 1.0}, {cplx(-0.4, 0.1), 2.0, 3.5}, {cplx(0.0, 0.6), 4.0, -2.0}, {cplx(0.3, -0.3), 1.0, 6.0}};

} // namespace

TEST(SymbolFromKernel, QuadratureMatchesClosedForm) {
    const auto a = harmonic_symbol(model());
    const auto ks = symbol_from_kernel(harmonic_kernel(model()), disc_spec());
    EXPECT_TRUE(ks->weyl_symmetric);
    EXPECT_GT(ks->analytic_strip, 0.0);
    for (const auto& [z, bang, r] : symbol_probes) {
        const cplx b = std::polar(1.0, bang);
        EXPECT_LT(rel(a->value(z, b, r), ks->value(z, b, r)), 1e-6) << z << " " << r;
    }
}

TEST(SymbolFromKernel, ZeroKernelGivesZeroSymbol) {
    KernelFunction K{[](cplx, cplx) { return cplx(0.0); }, DecayClass::gaussian(1.0)};
    QuadratureSpec q = disc_spec();
    q.disc_radius_max = 4.0;
    const auto a = symbol_from_kernel(K, q);
    EXPECT_EQ(std::abs(a->value(cplx(0.2, 0.1), cplx(1.0, 0.0), 2.0)), 0.0);
}

TEST(SymbolFromKernel, SlowDecayIsRefused) {
    KernelFunction K{[](cplx, cplx) { return cplx(1.0); }, DecayClass::exponential(0.8)};
    EXPECT_THROW(symbol_from_kernel(K, disc_spec()), TailTooFat);
}

TEST(SymbolFromKernel, ApproximateIdentityTendsToMultiplier) {
    // K_eps(z, w) = phi(z) exp(-d(z, w)^2 / eps^2) / N(eps), N the mass of the Gaussian
    QuadratureSpec q;
    q.disc_radius_max = 4.0;
    q.disc_radial_nodes = 192;
    q.disc_angular_nodes = 256;
    q.r_halfwidth = 2.0;
    const cplx z(0.1, 0.1);
    const double r = 1.0;
    const cplx b = std::polar(1.0, 0.8);
    const double phi = std::exp(-std::pow(radius_of(z), 2));
    std::vector<double> err;
    for (double eps : {0.5, 0.3, 0.2}) {
        const Rule s = gauss_legendre(200, 0.0, 8.0 * eps);
        double mass = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) mass += s.w[k] * two_pi * std::sinh(s.x[k]) * std::exp(-std::pow(s.x[k] / eps, 2));
        KernelFunction K{[eps, mass](cplx x, cplx w) {
                             const double sx = radius_of(x), d = dist(x, w);
                             return cplx(std::exp(-sx * sx - d * d / (eps * eps)) / mass);
                         },
                         DecayClass::gaussian(1.0)};
        const auto a = symbol_from_kernel(K, q);
        err.push_back(std::abs(a->value(z, b, r) - phi) / phi);
    }
    EXPECT_GT(err[0], err[1]);
    EXPECT_GT(err[1], err[2]);
    EXPECT_LT(err[2], 0.05);
}

TEST(KernelFromSymbol, RoundTripReproducesKernel) {
    const auto a = harmonic_symbol(model());
    const KernelFunction K = harmonic_kernel(model());
    const QuadratureSpec q = disc_spec();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        const cplx z = std::polar(0.6 * U(rng), two_pi * U(rng)), w = std::polar(0.6 * U(rng), two_pi * U(rng));
        const cplx k = K(z, w);
        EXPECT_LT(std::abs(kernel_from_symbol(*a, z, w, q) - k), 1e-3 * std::max(std::abs(k), 1e-2)) << z << " " << w;
    }
}

TEST(KernelFromSymbol, WeylHalfLinesAgree) {
    const auto a = harmonic_symbol(model());
    const QuadratureSpec q = disc_spec();
    for (auto [z, w] : std::vector<std::pair<cplx, cplx>>{{cplx(0.1, 0.2), cplx(-0.3, 0.1)}, {cplx(0.4, 0.0), cplx(0.2, -0.2)}}) {
        const cplx p = kernel_from_symbol(*a, z, w, q, HalfLine::positive);
        const cplx m = kernel_from_symbol(*a, z, w, q, HalfLine::negative);
        EXPECT_LT(rel(p, m), 1e-6);
    }
}

TEST(KernelFromSymbol, GaussianKernelSymbolIsWeylSymmetricAndHermitian) {
    QuadratureSpec q;
    q.disc_radius_max = 5.0;
    q.disc_radial_nodes = 64;
    q.disc_angular_nodes = 32;
    q.r_halfwidth = 8.0;
    q.r_nodes = 48;
    const KernelFunction K = gaussian_kernel(1.0, 0.5);
    const auto a = symbol_from_kernel(K, q);
    const cplx z(0.2, 0.1), w(-0.1, 0.25);
    for (double r : {0.7, 2.5}) EXPECT_LT(weyl_defect(*a, z, w, r, q), 1e-6);
    const cplx kzw = kernel_from_symbol(*a, z, w, q), kwz = kernel_from_symbol(*a, w, z, q);
    EXPECT_LT(rel(kzw, std::conj(kwz)), 1e-4);
    EXPECT_LT(rel(kzw, K(z, w)), 1e-3);
}

TEST(KernelFromSymbol, ZeroSymbol) {
    const auto a = make_symbol([](cplx, cplx, cplx) { return cplx(0.0); }, {});
    EXPECT_EQ(std::abs(kernel_from_symbol(*a, cplx(0.1), cplx(0.2), disc_spec())), 0.0);
}

TEST(OpApply, PlaneWaveIsMultipliedBySymbol) {
    const auto a = harmonic_symbol(model());
    const KernelFunction K = harmonic_kernel(model());
    for (const auto& [z, bang, r] : symbol_probes) {
        const cplx b = std::polar(1.0, bang);
        const DiscGrid g = make_disc_grid(6.0, 128, 64, std::abs(r));
        const cplx lhs = integrate_disc([&](cplx w) { return K(z, w) * plane_wave(cplx(0.0, r), b, w); }, g);
        const cplx rhs = a->value(z, b, r) * plane_wave(cplx(0.0, r), b, z);
        EXPECT_LT(rel(lhs, rhs), 1e-4) << z << " " << r;
    }
}

TEST(OpApply, IdentitySymbolReproducesField) {
    QuadratureSpec q = disc_spec();
    const ScalarField u = gaussian_field();
    const auto one = make_symbol([](cplx, cplx, cplx) { return cplx(1.0); }, {});
    const HelgasonTable Fu = tabulate_helgason(u, q);
    for (cplx z : {cplx(0.0), cplx(0.3, -0.2), cplx(-0.5, 0.1)}) EXPECT_LT(rel(op_apply(*one, Fu, z), u(z)), 1e-3);
}

TEST(OpApply, SymbolRouteMatchesKernelRoute) {
    QuadratureSpec q = disc_spec();
    const ScalarField u = gaussian_field();
    const auto a = harmonic_symbol(model());
    const KernelFunction K = harmonic_kernel(model());
    const HelgasonTable Fu = tabulate_helgason(u, q);
    for (cplx z : {cplx(0.1, 0.2), cplx(-0.4, 0.3)}) EXPECT_LT(rel(op_apply(*a, Fu, z), kernel_apply(K, u, z, q)), 1e-3);
}

TEST(HsNorm, MatchesKernelL2Norm) {
    QuadratureSpec q = disc_spec();
    const auto a = harmonic_symbol(model());
    const double hs = hs_norm2(*a, q);
    QuadratureSpec qk = q;
    qk.disc_radius_max = 5.0;
    const double kl = kernel_l2_norm2(harmonic_kernel(model()), qk);
    EXPECT_LT(std::abs(hs - kl) / kl, 1e-3);
}

TEST(HsNorm, HomogeneityAndZero) {
    QuadratureSpec q = disc_spec();
    q.disc_radius_max = 5.0;
    q.r_nodes = 64;
    const auto a = harmonic_symbol(model());
    const auto two_a = combine({{cplx(0.0, 2.0), a}});
    EXPECT_NEAR(hs_norm(*two_a, q) / hs_norm(*a, q), 2.0, 1e-12);
    const auto zero = make_symbol([](cplx, cplx, cplx) { return cplx(0.0); }, SymbolTraits{DecayClass::compact(1.0), {}});
    EXPECT_EQ(hs_norm(*zero, q), 0.0);
}

TEST(Wigner, QuadratureMatchesClosedForm) {
    const auto a = harmonic_symbol(model());
    const QuadratureSpec q = disc_spec();
    for (auto [r, b, rp, bp] : std::vector<std::tuple<double, double, double, double>>{
             {1.0, 0.3, 2.0, 1.5}, {3.5, 2.0, -3.0, 5.0}, {-2.0, 1.0, 4.5, 0.2}}) {
        const cplx w1 = *a->wigner_exact(r, std::polar(1.0, b), rp, std::polar(1.0, bp));
        const cplx w2 = wigner_transform(*a, r, BoundaryPoint(b), rp, BoundaryPoint(bp), q);
        EXPECT_LT(rel(w1, w2), 1e-6);
    }
}

TEST(Wigner, EqualsFourierTransformOfWeightedSlice) {
    const auto a = harmonic_symbol(model());
    const QuadratureSpec q = disc_spec();
    const double r = 1.3, rp = 2.2;
    const BoundaryPoint b(0.4), bp(2.9);
    const ScalarField f{[&](cplx z) { return a->value(z, b.value(), r) * plane_wave(cplx(0.0, r), b, z); },
                        DecayClass::gaussian(0.5)};
    EXPECT_LT(rel(wigner_transform(*a, r, b, rp, bp, q), helgason_fourier(f, bp, -rp, q)), 1e-6);
}

TEST(Wigner, Linearity) {
    const auto a = harmonic_symbol(model());
    const auto c = harmonic_symbol(make_harmonic_model({{0, cplx(0.5, 0.0), 1.2, 2.0}, {3, cplx(0.0, 0.4), 1.0, 3.0}}));
    const auto lc = combine({{cplx(2.0, 0.0), a}, {cplx(0.0, 3.0), c}});
    const QuadratureSpec q = disc_spec();
    const BoundaryPoint b(1.1), bp(4.0);
    const cplx lhs = wigner_transform(*lc, 1.5, b, -0.5, bp, q);
    const cplx rhs = 2.0 * wigner_transform(*a, 1.5, b, -0.5, bp, q) + cplx(0.0, 3.0) * wigner_transform(*c, 1.5, b, -0.5, bp, q);
    EXPECT_LT(rel(lhs, rhs), 1e-12);
}

namespace {

WignerTable harmonic_table() {
    const Rule r_axis = gauss_legendre(8, 0.5, 8.0);
    const Rule rp_axis = gauss_legendre(160, -16.0, 16.0);
    return tabulate_wigner(*harmonic_symbol(model()), r_axis, 16, rp_axis, 96, disc_spec());
}

} // namespace

TEST(WignerInverse, RoundTripAtTableNodes) {
    const auto a = harmonic_symbol(model());
    const WignerTable W = harmonic_table();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        const std::size_t ir = i % 8, ib = (3 * i) % 16;
        const cplx z = std::polar(0.5 * U(rng), two_pi * U(rng));
        const BoundaryPoint b(W.b[ib]);
        const cplx want = a->value(z, b.value(), W.r.x[ir]);
        EXPECT_LT(rel(wigner_inverse(W, z, b, W.r.x[ir]), want), 1e-3) << z << " r=" << W.r.x[ir];
    }
}

TEST(WignerInverse, SliceIsometry) {
    const auto a = harmonic_symbol(model());
    const WignerTable W = harmonic_table();
    const QuadratureSpec q = disc_spec();
    for (std::size_t ir = 0; ir < 8; ++ir) {
        const std::size_t ib = (5 * ir) % 16;
        const double lhs = wigner_slice_norm2(W, ir, ib);
        const double rhs = symbol_slice_norm2(*a, BoundaryPoint(W.b[ib]), W.r.x[ir], q);
        EXPECT_LT(std::abs(lhs - rhs) / rhs, 1e-3) << "r=" << W.r.x[ir];
    }
}

TEST(WignerInverse, ZeroTable) {
    WignerTable W = harmonic_table();
    std::fill(W.values.begin(), W.values.end(), cplx(0.0));
    EXPECT_EQ(std::abs(wigner_inverse(W, cplx(0.1, 0.1), BoundaryPoint(W.b[2]), W.r.x[3])), 0.0);
}

TEST(WignerInverse, CoarseAxisIsRefused) {
    const auto a = harmonic_symbol(model());
    const WignerTable W = tabulate_wigner(*a, gauss_legendre(4, 0.0, 12.0), 16, gauss_legendre(64, -16.0, 16.0), 32, disc_spec());
    EXPECT_THROW(wigner_inverse(W, cplx(0.1, 0.0), BoundaryPoint(0.3), 5.1), GridTooCoarse);
    EXPECT_THROW(wigner_inverse(W, cplx(0.1, 0.0), BoundaryPoint(0.3), 13.0), GridTooCoarse);
}

TEST(WignerTableIo, RoundTripIsExact) {
    const auto a = harmonic_symbol(model());
    const WignerTable W = tabulate_wigner(*a, gauss_legendre(3, 0.5, 3.0), 4, gauss_legendre(5, -4.0, 4.0), 6, disc_spec());
    const auto dir = std::filesystem::temp_directory_path() / "hypharm_table_io";
    std::filesystem::create_directories(dir);
    const std::string stem = (dir / "w").string();
    write_wigner_table(W, stem);
    const WignerTable R = read_wigner_table(stem);
    EXPECT_EQ(R.r.x, W.r.x);
    EXPECT_EQ(R.rp.w, W.rp.w);
    EXPECT_EQ(R.b, W.b);
    EXPECT_EQ(R.bp, W.bp);
    ASSERT_EQ(R.values.size(), W.values.size());
    for (std::size_t k = 0; k < W.values.size(); ++k) EXPECT_EQ(R.values[k], W.values[k]);
    EXPECT_THROW(read_ps_table(stem), ConfigError);
    std::ofstream(stem + ".csv", std::ios::app) << "garbage\n";
    EXPECT_THROW(read_wigner_table(stem), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST(WignerTableIo, NonIncreasingAxisIsRefused) {
    WignerTable W;
    W.r = Rule{{0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
    W.rp = gauss_legendre(4, -1.0, 1.0);
    W.b = angle_grid(4);
    W.bp = angle_grid(4);
    EXPECT_THROW(W.check_grid(), GridTooCoarse);
}
