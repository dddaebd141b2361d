#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "spectral_table.hpp"
#include "transforms.hpp"

namespace hypharm {

// Decay of a symbol in the spectral variable, uniformly in (z, b).
struct SpectralDecay {
    enum class Kind { gaussian, superpolynomial };
    Kind kind = Kind::gaussian;
    double param = 1.0;
};

// A symbol a(z, b, r) on D x B x R. Subclasses supply value(); the rest has generic defaults.
class Symbol {
  public:
    DecayClass decay = DecayClass::gaussian(1.0);  // in d(z, o), uniformly in (b, r)
    SpectralDecay r_decay;
    double analytic_strip = 0.0;     // a(z, b, .) is holomorphic for |Im r| < analytic_strip
    bool weyl_symmetric = false;
    bool rotation_invariant = false; // a(k z, k b, r) = a(z, b, r)

    virtual ~Symbol() = default;

    // b is a unit complex number; r may be complex inside the analytic strip
    virtual cplx value(cplx z, cplx b, cplx r) const = 0;

    cplx operator()(cplx z, BoundaryPoint b, cplx r) const {
        check_frequency(r);
        return value(z, b.value(), r);
    }

    // the symbol as a function on G x R, through z = g.o, b = g.1
    cplx at(const GroupElement& g, cplx r) const {
        check_frequency(r);
        return value(act(g, cplx(0.0)), act_boundary(g, cplx(1.0)), r);
    }

    virtual std::vector<cplx> values_r(cplx z, cplx b, const std::vector<double>& rs) const {
        std::vector<cplx> out(rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i) out[i] = value(z, b, rs[i]);
        return out;
    }

    // int_R a(z, b, r) e^{2 i r tau} dr; the rule is used unless a closed form exists
    virtual cplx r_fourier(cplx z, cplx b, double tau, const Rule& r_rule) const {
        const std::vector<cplx> v = values_r(z, b, r_rule.x);
        cplx acc = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) acc += r_rule.w[i] * v[i] * std::polar(1.0, 2.0 * r_rule.x[i] * tau);
        return acc;
    }

    virtual std::optional<cplx> wigner_exact(double /*r*/, cplx /*b*/, double /*rp*/, cplx /*bp*/) const {
        return std::nullopt;
    }

    // Schrodinger evolution by time t in closed form, when the subclass knows it
    virtual std::shared_ptr<const Symbol> evolved_exact(double /*t*/) const { return nullptr; }

    void check_frequency(cplx r) const {
        if (std::abs(r.imag()) > analytic_strip)
            throw AnalyticStripExceeded("symbol evaluated outside its declared analytic strip");
    }
};

using SymbolPtr = std::shared_ptr<const Symbol>;

class FunctionSymbol : public Symbol {
  public:
    using Fn = std::function<cplx(cplx, cplx, cplx)>;
    explicit FunctionSymbol(Fn f) : f_(std::move(f)) {}
    cplx value(cplx z, cplx b, cplx r) const override { return f_(z, b, r); }

  private:
    Fn f_;
};

struct SymbolTraits {
    DecayClass decay = DecayClass::gaussian(1.0);
    SpectralDecay r_decay;
    double analytic_strip = 0.0;
    bool weyl_symmetric = false;
    bool rotation_invariant = false;
};

inline SymbolPtr make_symbol(FunctionSymbol::Fn f, const SymbolTraits& tr) {
    auto s = std::make_shared<FunctionSymbol>(std::move(f));
    s->decay = tr.decay;
    s->r_decay = tr.r_decay;
    s->analytic_strip = tr.analytic_strip;
    s->weyl_symmetric = tr.weyl_symmetric;
    s->rotation_invariant = tr.rotation_invariant;
    return s;
}

// sum_i c_i a_i
class LinearCombination : public Symbol {
  public:
    explicit LinearCombination(std::vector<std::pair<cplx, SymbolPtr>> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) throw Error("LinearCombination: no terms");
        analytic_strip = terms_[0].second->analytic_strip;
        weyl_symmetric = rotation_invariant = true;
        double rate = 1e300;
        for (const auto& [c, a] : terms_) {
            analytic_strip = std::min(analytic_strip, a->analytic_strip);
            weyl_symmetric = weyl_symmetric && a->weyl_symmetric;
            rotation_invariant = rotation_invariant && a->rotation_invariant;
            rate = std::min(rate, a->decay.param);
        }
        decay = terms_[0].second->decay;
        decay.param = rate;
        r_decay = terms_[0].second->r_decay;
    }

    cplx value(cplx z, cplx b, cplx r) const override {
        cplx acc = 0.0;
        for (const auto& [c, a] : terms_) acc += c * a->value(z, b, r);
        return acc;
    }

    std::vector<cplx> values_r(cplx z, cplx b, const std::vector<double>& rs) const override {
        std::vector<cplx> out(rs.size(), 0.0);
        for (const auto& [c, a] : terms_) {
            const auto v = a->values_r(z, b, rs);
            for (std::size_t i = 0; i < rs.size(); ++i) out[i] += c * v[i];
        }
        return out;
    }

    cplx r_fourier(cplx z, cplx b, double tau, const Rule& r_rule) const override {
        cplx acc = 0.0;
        for (const auto& [c, a] : terms_) acc += c * a->r_fourier(z, b, tau, r_rule);
        return acc;
    }

    std::optional<cplx> wigner_exact(double r, cplx b, double rp, cplx bp) const override {
        cplx acc = 0.0;
        for (const auto& [c, a] : terms_) {
            const auto w = a->wigner_exact(r, b, rp, bp);
            if (!w) return std::nullopt;
            acc += c * *w;
        }
        return acc;
    }

    std::shared_ptr<const Symbol> evolved_exact(double t) const override {
        std::vector<std::pair<cplx, SymbolPtr>> ev;
        for (const auto& [c, a] : terms_) {
            SymbolPtr e = a->evolved_exact(t);
            if (!e) return nullptr;
            ev.emplace_back(c, e);
        }
        return std::make_shared<LinearCombination>(std::move(ev));
    }

  private:
    std::vector<std::pair<cplx, SymbolPtr>> terms_;
};

inline SymbolPtr combine(std::vector<std::pair<cplx, SymbolPtr>> terms) {
    return std::make_shared<LinearCombination>(std::move(terms));
}

// ---- kernels ---------------------------------------------------------------

struct KernelFunction {
    std::function<cplx(cplx, cplx)> k;
    DecayClass decay;                 // in d(z, o) and in d(w, o)
    bool rotation_invariant = false;  // K(k z, k w) = K(z, w)

    cplx operator()(cplx z, cplx w) const { return k(z, w); }
};

// K(z, w) = exp(-alpha (d(z,o)^2 + d(w,o)^2) - beta d(z,w)^2)
inline KernelFunction gaussian_kernel(double alpha, double beta) {
    KernelFunction K;
    K.k = [alpha, beta](cplx z, cplx w) {
        const double sz = radius_of(z), sw = radius_of(w), d = dist(z, w);
        return cplx(std::exp(-alpha * (sz * sz + sw * sw) - beta * d * d));
    };
    K.decay = DecayClass::gaussian(alpha);
    K.rotation_invariant = true;
    return K;
}

namespace detail {

inline void check_kernel_decay(const KernelFunction& K, cplx r, const QuadratureSpec& q) {
    check_field_for_frequency(ScalarField{nullptr, K.decay}, r, q);
}

inline double kernel_radius(const KernelFunction& K, const QuadratureSpec& q) {
    return K.decay.kind == DecayClass::Kind::compact ? std::min(K.decay.param, q.disc_radius_max) : q.disc_radius_max;
}

} // namespace detail

// a(z, b, r) = e^{-(1/2 + i r)<z, b>} int K(z, w) e^{(1/2 + i r)<w, b>} dw
class KernelSymbol : public Symbol {
  public:
    KernelSymbol(KernelFunction K, const QuadratureSpec& q) : K_(std::move(K)), q_(q) {
        q.validate();
        if (K_.decay.kind == DecayClass::Kind::exponential && K_.decay.param <= 1.0)
            throw TailTooFat("symbol_from_kernel: off-diagonal decay too slow for a symbol");
        grid_ = make_disc_grid(detail::kernel_radius(K_, q), q.disc_radial_nodes, q.disc_angular_nodes, q.r_halfwidth);
        weyl_symmetric = true;
        rotation_invariant = K_.rotation_invariant;
        decay = K_.decay;
        if (decay.kind == DecayClass::Kind::gaussian) decay.param *= 0.5;
        r_decay = {SpectralDecay::Kind::superpolynomial, 1.0};
        analytic_strip = K_.decay.kind == DecayClass::Kind::exponential ? K_.decay.param - 1.0 : 2.0;
    }

    cplx value(cplx z, cplx b, cplx r) const override {
        detail::check_kernel_decay(K_, r, q_);
        const cplx ex(0.5 - r.imag(), r.real());
        cplx acc = 0.0;
        for (std::size_t k = 0; k < grid_.size(); ++k)
            acc += grid_.w[k] * K_(z, grid_.z[k]) * std::exp(ex * busemann(grid_.z[k], b));
        return std::exp(-ex * busemann(z, b)) * acc;
    }

    std::vector<cplx> values_r(cplx z, cplx b, const std::vector<double>& rs) const override {
        for (double r : rs) detail::check_kernel_decay(K_, r, q_);
        std::vector<double> bus(grid_.size());
        std::vector<cplx> amp(grid_.size());
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            bus[k] = busemann(grid_.z[k], b);
            amp[k] = grid_.w[k] * K_(z, grid_.z[k]) * std::exp(0.5 * bus[k]);
        }
        const double bz = busemann(z, b);
        std::vector<cplx> out(rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < grid_.size(); ++k) acc += amp[k] * std::polar(1.0, rs[i] * bus[k]);
            out[i] = std::exp(-cplx(0.5, rs[i]) * bz) * acc;
        }
        return out;
    }

    const KernelFunction& kernel() const { return K_; }

  private:
    KernelFunction K_;
    QuadratureSpec q_;
    DiscGrid grid_;
};

inline SymbolPtr symbol_from_kernel(const KernelFunction& K, const QuadratureSpec& q) {
    return std::make_shared<KernelSymbol>(K, q);
}

enum class HalfLine { positive, negative };

// Boundary rule for integrands e^{(1/2 +- i r)<z, b>} with z up to radius s.
inline Rule boundary_rule(double s, const QuadratureSpec& q) {
    return periodic_trapezoid(ring_nodes(s, q.disc_angular_nodes, q.r_halfwidth), 1.0);
}

// K(z, w) = int_{R+ or R-} int_B a(z, b, r) e^{(1/2 + i r)<z, b>} e^{(1/2 - i r)<w, b>} db dp(r)
inline cplx kernel_from_symbol(const Symbol& a, cplx z, cplx w, const QuadratureSpec& q,
                               HalfLine side = HalfLine::positive) {
    q.validate();
    const Rule b = boundary_rule(std::max(radius_of(z), radius_of(w)), q);
    Rule r = gauss_legendre(q.r_nodes, 0.0, q.r_halfwidth);
    if (side == HalfLine::negative)
        for (double& x : r.x) x = -x;
    std::vector<cplx> cols = parallel_map<cplx>(b.size(), [&](std::size_t j) {
        const cplx bb = std::polar(1.0, b.x[j]);
        const double bz = busemann(z, bb), bw = busemann(w, bb);
        const std::vector<cplx> v = a.values_r(z, bb, r.x);
        cplx acc = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
            acc += r.w[i] * plancherel_density(r.x[i]) * v[i] * std::exp(0.5 * (bz + bw)) *
                   std::polar(1.0, r.x[i] * (bz - bw));
        return b.w[j] * acc;
    });
    cplx acc = 0.0;
    for (const cplx& c : cols) acc += c;
    return acc;
}

// Relative defect of the Weyl symmetry between the R+ and R- forms at a single frequency:
// int_B a(z,b,r) e_{ir,b}(z) e_{-ir,b}(w) db  versus  int_B a(z,b,-r) e_{-ir,b}(z) e_{ir,b}(w) db.
inline double weyl_defect(const Symbol& a, cplx z, cplx w, double r, const QuadratureSpec& q) {
    const Rule b = boundary_rule(std::max(radius_of(z), radius_of(w)), q);
    cplx plus = 0.0, minus = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        const cplx bb = std::polar(1.0, b.x[j]);
        const double bz = busemann(z, bb), bw = busemann(w, bb);
        const double amp = std::exp(0.5 * (bz + bw));
        plus += b.w[j] * a.value(z, bb, r) * amp * std::polar(1.0, r * (bz - bw));
        minus += b.w[j] * a.value(z, bb, -r) * amp * std::polar(1.0, -r * (bz - bw));
    }
    return std::abs(plus - minus) / std::max(std::abs(plus), 1e-300);
}

// ---- operators -------------------------------------------------------------

// Op(a) u (z) = int_{R+} int_B a(z, b, r) e^{(1/2 + i r)<z, b>} F u(b, r) db dp(r)
inline cplx op_apply(const Symbol& a, const HelgasonTable& Fu, cplx z) {
    const std::size_t nb = Fu.grid.b.size(), nr = Fu.grid.r.size();
    cplx acc = 0.0;
    for (std::size_t ib = 0; ib < nb; ++ib) {
        const cplx bb = std::polar(1.0, Fu.grid.b.x[ib]);
        const double bz = busemann(z, bb);
        const std::vector<cplx> v = a.values_r(z, bb, Fu.grid.r.x);
        cplx col = 0.0;
        for (std::size_t ir = 0; ir < nr; ++ir)
            col += Fu.grid.r.w[ir] * v[ir] * std::exp(cplx(0.5, Fu.grid.r.x[ir]) * bz) * Fu.at(ir, ib);
        acc += Fu.grid.b.w[ib] * col;
    }
    return acc;
}

inline cplx op_apply(const Symbol& a, const ScalarField& u, cplx z, const QuadratureSpec& q) {
    return op_apply(a, tabulate_helgason(u, q), z);
}

// int K(z, w) u(w) dw, the kernel-side route
inline cplx kernel_apply(const KernelFunction& K, const ScalarField& u, cplx z, const QuadratureSpec& q) {
    const DiscGrid g = make_disc_grid(q);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) acc += g.w[k] * K(z, g.z[k]) * u(g.z[k]);
    return acc;
}

// ||K||^2 over D x D on the tensor grid given by q. For a rotation invariant kernel the outer
// point is fixed on the positive axis of each ring.
inline double kernel_l2_norm2(const KernelFunction& K, const QuadratureSpec& q) {
    const double S = detail::kernel_radius(K, q);
    const DiscGrid g = make_disc_grid(S, q.disc_radial_nodes, q.disc_angular_nodes);
    if (K.rotation_invariant) {
        const Rule rs = gauss_legendre(q.disc_radial_nodes, 0.0, S);
        return parallel_sum<double>(rs.size(), [&](std::size_t i) {
            const cplx z(std::tanh(0.5 * rs.x[i]), 0.0);
            double acc = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) acc += g.w[k] * std::norm(K(z, g.z[k]));
            return rs.w[i] * std::sinh(rs.x[i]) * two_pi * acc;
        });
    }
    const std::vector<double> rows = parallel_map<double>(g.size(), [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) acc += g.w[k] * std::norm(K(g.z[i], g.z[k]));
        return g.w[i] * acc;
    });
    double acc = 0.0;
    for (double v : rows) acc += v;
    return acc;
}

// ||a||^2 = int_D int_B int_{R+} |a|^2 P(z, b) dp(r) db dz
inline double hs_norm2(const Symbol& a, const QuadratureSpec& q) {
    q.validate();
    const double S = a.decay.kind == DecayClass::Kind::compact ? std::min(a.decay.param, q.disc_radius_max)
                                                                : q.disc_radius_max;
    const DiscGrid g = make_disc_grid(S, q.disc_radial_nodes, q.disc_angular_nodes);
    const Rule r = gauss_legendre(q.r_nodes, 0.0, q.r_halfwidth);
    const Rule b = a.rotation_invariant ? Rule{{0.0}, {1.0}} : periodic_trapezoid(q.disc_angular_nodes, 1.0);
    const std::vector<double> rows = parallel_map<double>(g.size(), [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const cplx bb = std::polar(1.0, b.x[j]);
            const std::vector<cplx> v = a.values_r(g.z[k], bb, r.x);
            double col = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) col += r.w[i] * plancherel_density(r.x[i]) * std::norm(v[i]);
            acc += b.w[j] * poisson_kernel(g.z[k], bb) * col;
        }
        return g.w[k] * acc;
    });
    double acc = 0.0;
    for (double v : rows) acc += v;
    return acc;
}

inline double hs_norm(const Symbol& a, const QuadratureSpec& q) { return std::sqrt(hs_norm2(a, q)); }

// ---- Wigner transform --------------------------------------------------------

// W a(r, b, r', b') = int a(z, b, r) e^{(1/2 + i r)<z, b>} e^{(1/2 + i r')<z, b'>} dz, by disc quadrature
inline cplx wigner_transform(const Symbol& a, double r, BoundaryPoint b, double rp, BoundaryPoint bp,
                             const QuadratureSpec& q) {
    q.validate();
    if (a.decay.kind == DecayClass::Kind::exponential && a.decay.param <= 2.0)
        throw TailTooFat("wigner_transform: symbol decay does not beat the plane-wave growth");
    const double S = a.decay.kind == DecayClass::Kind::compact ? std::min(a.decay.param, q.disc_radius_max)
                                                                : q.disc_radius_max;
    const DiscGrid g = make_disc_grid(S, q.disc_radial_nodes, q.disc_angular_nodes, std::abs(r) + std::abs(rp));
    const cplx bb = b.value(), bbp = bp.value();
    return parallel_sum<cplx>(g.size(), [&](std::size_t k) {
        const double u = busemann(g.z[k], bb), v = busemann(g.z[k], bbp);
        return g.w[k] * a.value(g.z[k], bb, r) * std::exp(0.5 * (u + v)) * std::polar(1.0, r * u + rp * v);
    });
}

// W a on a grid. r_axis / rp_axis carry quadrature weights (dp not included); the b axes have
// nb / nbp equispaced angles. Closed forms are used when the symbol provides them.
inline WignerTable tabulate_wigner(const Symbol& a, const Rule& r_axis, int nb, const Rule& rp_axis, int nbp,
                                   const QuadratureSpec& q, bool use_exact = true) {
    WignerTable t;
    t.r = r_axis;
    t.rp = rp_axis;
    t.b = angle_grid(nb);
    t.bp = angle_grid(nbp);
    t.check_grid();
    t.allocate();
    const std::size_t NR = t.r.size(), NB = t.b.size(), NRP = t.rp.size(), NBP = t.bp.size();
    const bool exact = use_exact && a.wigner_exact(t.r.x[0], t.b.empty() ? 1.0 : std::polar(1.0, t.b[0]),
                                                   t.rp.x[0], std::polar(1.0, t.bp[0]))
                                        .has_value();
    if (exact) {
        parallel_for(NR * NB, [&](std::size_t ij) {
            const std::size_t i = ij / NB, j = ij % NB;
            for (std::size_t k = 0; k < NRP; ++k)
                for (std::size_t l = 0; l < NBP; ++l)
                    t.at(i, j, k, l) = *a.wigner_exact(t.r.x[i], std::polar(1.0, t.b[j]), t.rp.x[k], std::polar(1.0, t.bp[l]));
        });
    } else {
        for (std::size_t i = 0; i < NR; ++i)
            for (std::size_t j = 0; j < NB; ++j)
                for (std::size_t k = 0; k < NRP; ++k)
                    for (std::size_t l = 0; l < NBP; ++l)
                        t.at(i, j, k, l) = wigner_transform(a, t.r.x[i], BoundaryPoint(t.b[j]), t.rp.x[k], BoundaryPoint(t.bp[l]), q);
    }
    return t;
}

namespace detail {

// fraction of the energy in the upper half of the resolved angular band, over all rows
inline double angular_tail_fraction(const std::vector<std::vector<cplx>>& rows) {
    double top = 0.0, all = 0.0;
    for (const auto& row : rows) {
        const std::size_t n = row.size();
        if (n < 4) continue;
        for (std::size_t m = 0; m < n; ++m) {
            cplx c = 0.0;
            for (std::size_t k = 0; k < n; ++k) c += row[k] * std::polar(1.0, -two_pi * double(m * k % n) / n);
            const double e = std::norm(c);
            all += e;
            const std::size_t freq = std::min(m, n - m);
            if (4 * freq >= n) top += e;
        }
    }
    return all > 0.0 ? top / all : 0.0;
}

} // namespace detail

// Row W(r, b, ., .) at an arbitrary (r, b): cubic in r, trigonometric in b.
// Throws GridTooCoarse when r is off the table or either interpolation looks unresolved.
inline std::vector<cplx> wigner_row(const WignerTable& W, double r, BoundaryPoint b, double tol = 1e-3) {
    const std::size_t NB = W.b.size(), NRP = W.rp.size(), NBP = W.bp.size(), row = NRP * NBP;
    std::size_t first = 0;
    std::vector<double> wr;
    std::vector<double> dr;
    if (W.r.size() == 1) {
        if (std::abs(r - W.r.x[0]) > 1e-12) throw GridTooCoarse("wigner_row: r not on a single-node table");
        wr = {1.0};
        dr = {0.0};
    } else {
        const LocalWeights lw = cubic_weights(W.r.x, r);
        first = lw.first;
        wr = lw.w;
        dr = lw.dw;
    }
    // b interpolation; refuse when the b axis leaves too much energy near its Nyquist band
    std::vector<double> wb = trig_weights(W.b, b.angle);
    if (NB >= 4) {
        std::vector<std::vector<cplx>> rows;
        for (std::size_t a = 0; a < wr.size(); ++a) {
            std::vector<cplx> v(NB);
            const std::size_t sample = (NRP / 2) * NBP;
            for (std::size_t j = 0; j < NB; ++j) v[j] = W.values[(first + a) * NB * row + j * row + sample];
            rows.push_back(std::move(v));
        }
        if (detail::angular_tail_fraction(rows) > tol * tol)
            throw GridTooCoarse("wigner_row: b axis does not resolve the table");
    }
    std::vector<cplx> out(row, 0.0), err(row, 0.0);
    for (std::size_t a = 0; a < wr.size(); ++a)
        for (std::size_t j = 0; j < NB; ++j) {
            if (wb[j] == 0.0) continue;
            const cplx* src = &W.values[((first + a) * NB + j) * row];
            for (std::size_t k = 0; k < row; ++k) {
                out[k] += wr[a] * wb[j] * src[k];
                err[k] += dr[a] * wb[j] * src[k];
            }
        }
    double emax = 0.0, vmax = 0.0;
    for (std::size_t k = 0; k < row; ++k) {
        emax = std::max(emax, std::abs(err[k]));
        vmax = std::max(vmax, std::abs(out[k]));
    }
    if (emax > tol * std::max(vmax, 1e-300)) throw GridTooCoarse("wigner_row: r axis too coarse for cubic interpolation");
    return out;
}

// a(z, b, r) = e^{-(1/2 + i r)<z, b>} (1/2) int_R int_B e^{(1/2 - i r')<z, b'>} W(r, b, r', b') db' dp(r').
// The r' axis of the table must cover R symmetrically with its quadrature weights.
inline cplx wigner_inverse(const WignerTable& W, cplx z, BoundaryPoint b, double r, double tol = 1e-3) {
    const std::vector<cplx> row = wigner_row(W, r, b, tol);
    const std::size_t NRP = W.rp.size(), NBP = W.bp.size();
    std::vector<double> bus(NBP);
    for (std::size_t l = 0; l < NBP; ++l) bus[l] = busemann(z, std::polar(1.0, W.bp[l]));
    cplx acc = 0.0;
    for (std::size_t k = 0; k < NRP; ++k) {
        const double rp = W.rp.x[k];
        cplx col = 0.0;
        for (std::size_t l = 0; l < NBP; ++l) col += row[k * NBP + l] * std::exp(cplx(0.5, -rp) * bus[l]);
        acc += W.rp.w[k] * plancherel_density(rp) * col / static_cast<double>(NBP);
    }
    return std::exp(-cplx(0.5, r) * busemann(z, b.value())) * 0.5 * acc;
}

// (1/2) int_R int_B |W(r_i, b_j, r', b')|^2 db' dp(r') for one table slice
inline double wigner_slice_norm2(const WignerTable& W, std::size_t ir, std::size_t ib) {
    double acc = 0.0;
    for (std::size_t k = 0; k < W.rp.size(); ++k) {
        double col = 0.0;
        for (std::size_t l = 0; l < W.bp.size(); ++l) col += std::norm(W.at(ir, ib, k, l));
        acc += W.rp.w[k] * plancherel_density(W.rp.x[k]) * col / static_cast<double>(W.bp.size());
    }
    return 0.5 * acc;
}

// int_D |a(z, b, r)|^2 P(z, b) dz, the symbol side of the slice isometry
inline double symbol_slice_norm2(const Symbol& a, BoundaryPoint b, double r, const QuadratureSpec& q) {
    const double S = a.decay.kind == DecayClass::Kind::compact ? std::min(a.decay.param, q.disc_radius_max)
                                                                : q.disc_radius_max;
    const DiscGrid g = make_disc_grid(S, q.disc_radial_nodes, q.disc_angular_nodes);
    const cplx bb = b.value();
    double acc = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) acc += g.w[k] * std::norm(a.value(g.z[k], bb, r)) * poisson_kernel(g.z[k], bb);
    return acc;
}

} // namespace hypharm
