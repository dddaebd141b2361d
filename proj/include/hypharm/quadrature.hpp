#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace hypharm {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

namespace detail {

inline Rule compute_gauss_legendre(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    if (n == 1) {
        r.x[0] = 0.0;
        r.w[0] = 2.0;
        return r;
    }
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

} // namespace detail

// Gauss-Legendre rule on [-1, 1], cached per node count.
inline const Rule& gauss_legendre(int n) {
    if (n < 1) throw QuadratureNotConverged("gauss_legendre: n must be positive");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Rule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<Rule>(detail::compute_gauss_legendre(n))).first;
    return *it->second;
}

inline Rule gauss_legendre(int n, double lo, double hi) {
    const Rule& base = gauss_legendre(n);
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    const double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
    for (int i = 0; i < n; ++i) {
        r.x[i] = c + h * base.x[i];
        r.w[i] = h * base.w[i];
    }
    return r;
}

// Composite Gauss-Legendre: `panels` equal panels of `per_panel` nodes each.
inline Rule composite_gauss_legendre(int panels, int per_panel, double lo, double hi) {
    Rule r;
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        Rule q = gauss_legendre(per_panel, lo + p * h, lo + (p + 1) * h);
        r.x.insert(r.x.end(), q.x.begin(), q.x.end());
        r.w.insert(r.w.end(), q.w.begin(), q.w.end());
    }
    return r;
}

// Rule on [-half, half] for integrands carrying the Plancherel density r tanh(pi r), whose poles
// at +-i/2 stall plain Gauss-Legendre on a symmetric interval. 0 is a panel edge.
inline Rule symmetric_spectral_rule(double half, int n) {
    const int panels = 2 * std::max(1, n / 32);
    return composite_gauss_legendre(panels, std::max(8, n / panels), -half, half);
}

// Equispaced periodic rule on [0, 2pi) with weights summing to `total`.
inline Rule periodic_trapezoid(int n, double total = 1.0, double offset = 0.0) {
    Rule r;
    r.x.resize(n);
    r.w.assign(n, total / n);
    for (int k = 0; k < n; ++k) r.x[k] = offset + two_pi * k / n;
    return r;
}

// Chebyshev points of the second kind on [lo, hi] (ascending) with Clenshaw-Curtis weights.
inline Rule clenshaw_curtis(int n, double lo, double hi) {
    if (n < 2) throw QuadratureNotConverged("clenshaw_curtis: need at least 2 nodes");
    const int N = n - 1;
    Rule r;
    r.x.resize(n);
    r.w.assign(n, 0.0);
    for (int k = 0; k <= N; ++k) {
        const double th = pi * (N - k) / N;
        r.x[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(th);
        double s = 0.0;
        for (int j = 1; j <= N / 2; ++j) {
            const double b = (2 * j == N) ? 1.0 : 2.0;
            s += b / (4.0 * j * j - 1.0) * std::cos(2.0 * j * th);
        }
        const double c = (k == 0 || k == N) ? 1.0 : 2.0;
        r.w[k] = c / N * (1.0 - s) * 0.5 * (hi - lo);
    }
    return r;
}

// Truncation radii, node counts and target tolerance for every disc/line integral.
struct QuadratureSpec {
    double disc_radius_max = 12.0;
    int disc_radial_nodes = 96;
    int disc_angular_nodes = 128;
    double line_halfwidth = 20.0;
    int line_nodes = 256;
    double r_halfwidth = 24.0;
    int r_nodes = 192;
    double tol = 1e-3;

    void validate() const {
        if (disc_radial_nodes < 8 || disc_angular_nodes < 8 || line_nodes < 8 || r_nodes < 8)
            throw ConfigError("QuadratureSpec: node counts must be >= 8");
        if (!(tol > 0.0 && tol <= 1e-2)) throw ConfigError("QuadratureSpec: tol must lie in (0, 1e-2]");
        if (!(disc_radius_max > 0.0 && line_halfwidth > 0.0 && r_halfwidth > 0.0))
            throw ConfigError("QuadratureSpec: truncation radii must be positive");
    }

    QuadratureSpec doubled() const {
        QuadratureSpec q = *this;
        q.disc_radial_nodes *= 2;
        q.disc_angular_nodes *= 2;
        q.line_nodes *= 2;
        q.r_nodes *= 2;
        return q;
    }
};

// Grid on the hyperbolic disc in geodesic polar coordinates: Gauss-Legendre in s on [0, S],
// trapezoid in the angle, area element sinh(s) ds dphi. Busemann-type integrands at radius s
// have angular Fourier modes decaying like tanh(s/2)^|m|, and a factor e^{-ir<z,b>} adds angular
// bandwidth of about 2 r / (1 - tanh(s/2)). Each ring therefore gets at least
// (ring_resolution + 2 r_max) / (1 - tanh(s/2)) angular nodes (capped), never fewer than `angular`.
struct DiscGrid {
    std::vector<cplx> z;
    std::vector<double> w;
    std::vector<double> s;   // radius of each node
    int radial = 0, angular = 0;

    std::size_t size() const { return z.size(); }
};

inline constexpr double ring_resolution = 30.0;
inline constexpr int ring_cap = 4096;

inline int ring_nodes(double s, int angular, double r_max = 0.0) {
    const double gap = 2.0 / (std::exp(s) + 1.0);  // 1 - tanh(s/2)
    const double need = std::min<double>(ring_cap, std::ceil((ring_resolution + 2.0 * r_max) / gap));
    int n = std::max(angular, static_cast<int>(need));
    return (n + 3) / 4 * 4;
}

inline DiscGrid make_disc_grid(double S, int radial, int angular, double r_max = 0.0, double angle_offset = 0.0) {
    DiscGrid g;
    g.radial = radial;
    g.angular = angular;
    const Rule rs = gauss_legendre(radial, 0.0, S);
    for (int i = 0; i < radial; ++i) {
        const double rho = std::tanh(0.5 * rs.x[i]);
        const int na = ring_nodes(rs.x[i], angular, r_max);
        const double wr = rs.w[i] * std::sinh(rs.x[i]) * two_pi / na;
        for (int j = 0; j < na; ++j) {
            const double ph = angle_offset + two_pi * j / na;
            g.z.push_back(std::polar(rho, ph));
            g.w.push_back(wr);
            g.s.push_back(rs.x[i]);
        }
    }
    return g;
}

inline DiscGrid make_disc_grid(const QuadratureSpec& q) {
    return make_disc_grid(q.disc_radius_max, q.disc_radial_nodes, q.disc_angular_nodes);
}

// Result of a quadrature with an error estimate from node doubling.
struct Estimate {
    cplx value;
    double error;
};

} // namespace hypharm
