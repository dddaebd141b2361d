#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

namespace hypharm {

// Values V(r, b, r', b') on a tensor grid. The r and r' axes carry quadrature weights
// (without the Plancherel density); the b and b' axes are equispaced angles.
struct SpectralTable {
    Rule r, rp;
    std::vector<double> b, bp;
    std::vector<cplx> values;

    std::size_t index(std::size_t ir, std::size_t ib, std::size_t irp, std::size_t ibp) const {
        return ((ir * b.size() + ib) * rp.size() + irp) * bp.size() + ibp;
    }
    cplx at(std::size_t ir, std::size_t ib, std::size_t irp, std::size_t ibp) const {
        return values[index(ir, ib, irp, ibp)];
    }
    cplx& at(std::size_t ir, std::size_t ib, std::size_t irp, std::size_t ibp) {
        return values[index(ir, ib, irp, ibp)];
    }
    void allocate() { values.assign(r.size() * b.size() * rp.size() * bp.size(), cplx(0.0)); }

    void check_grid() const {
        auto increasing = [](const std::vector<double>& x) {
            for (std::size_t i = 1; i < x.size(); ++i)
                if (!(x[i] > x[i - 1])) return false;
            return true;
        };
        if (!increasing(r.x) || !increasing(rp.x) || !increasing(b) || !increasing(bp))
            throw GridTooCoarse("spectral table: grid axes must be strictly increasing");
    }
};

struct WignerTable : SpectralTable {};
struct PsTable : SpectralTable {};

namespace detail {

inline nlohmann::json table_header(const SpectralTable& t, const std::string& kind) {
    nlohmann::json h;
    h["kind"] = kind;
    h["r"] = t.r.x;
    h["r_weights"] = t.r.w;
    h["b"] = t.b;
    h["rp"] = t.rp.x;
    h["rp_weights"] = t.rp.w;
    h["bp"] = t.bp;
    h["rows"] = t.values.size();
    h["columns"] = {"r", "b_index", "rp", "bp_index", "re", "im"};
    return h;
}

inline void write_table(const SpectralTable& t, const std::string& kind, const std::string& stem) {
    std::ofstream hj(stem + ".json");
    if (!hj) throw ConfigError("cannot write " + stem + ".json");
    hj << table_header(t, kind).dump(2) << "\n";
    std::ofstream csv(stem + ".csv");
    if (!csv) throw ConfigError("cannot write " + stem + ".csv");
    csv << "r,b_index,rp,bp_index,re,im\n";
    char line[256];
    for (std::size_t i = 0; i < t.r.size(); ++i)
        for (std::size_t j = 0; j < t.b.size(); ++j)
            for (std::size_t k = 0; k < t.rp.size(); ++k)
                for (std::size_t l = 0; l < t.bp.size(); ++l) {
                    const cplx v = t.at(i, j, k, l);
                    std::snprintf(line, sizeof line, "%.17g,%zu,%.17g,%zu,%.17g,%.17g\n", t.r.x[i], j, t.rp.x[k], l,
                                  v.real(), v.imag());
                    csv << line;
                }
}

inline void read_table(SpectralTable& t, const std::string& kind, const std::string& stem) {
    std::ifstream hj(stem + ".json");
    if (!hj) throw ConfigError("cannot read " + stem + ".json");
    const nlohmann::json h = nlohmann::json::parse(hj);
    if (h.at("kind").get<std::string>() != kind) throw ConfigError("table kind mismatch in " + stem + ".json");
    t.r.x = h.at("r").get<std::vector<double>>();
    t.r.w = h.at("r_weights").get<std::vector<double>>();
    t.b = h.at("b").get<std::vector<double>>();
    t.rp.x = h.at("rp").get<std::vector<double>>();
    t.rp.w = h.at("rp_weights").get<std::vector<double>>();
    t.bp = h.at("bp").get<std::vector<double>>();
    t.allocate();
    std::ifstream csv(stem + ".csv");
    if (!csv) throw ConfigError("cannot read " + stem + ".csv");
    std::string line;
    std::getline(csv, line);
    std::size_t n = 0;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        double r, rp, re, im;
        std::size_t jb, lb;
        if (std::sscanf(line.c_str(), "%lf,%zu,%lf,%zu,%lf,%lf", &r, &jb, &rp, &lb, &re, &im) != 6)
            throw ConfigError("malformed row in " + stem + ".csv");
        if (n >= t.values.size()) throw ConfigError("too many rows in " + stem + ".csv");
        t.values[n++] = {re, im};
    }
    if (n != t.values.size()) throw ConfigError("row count mismatch in " + stem + ".csv");
    t.check_grid();
}

} // namespace detail

inline void write_wigner_table(const WignerTable& t, const std::string& stem) { detail::write_table(t, "wigner", stem); }
inline void write_ps_table(const PsTable& t, const std::string& stem) { detail::write_table(t, "ps", stem); }

inline WignerTable read_wigner_table(const std::string& stem) {
    WignerTable t;
    detail::read_table(t, "wigner", stem);
    return t;
}
inline PsTable read_ps_table(const std::string& stem) {
    PsTable t;
    detail::read_table(t, "ps", stem);
    return t;
}

// Angular grid of n equispaced points on [0, 2 pi).
inline std::vector<double> angle_grid(int n, double offset = 0.0) {
    std::vector<double> a(n);
    for (int k = 0; k < n; ++k) a[k] = offset + two_pi * k / n;
    return a;
}

// Trigonometric interpolation weights on an equispaced periodic grid (Dirichlet kernel, any n).
inline std::vector<double> trig_weights(const std::vector<double>& grid, double x) {
    const std::size_t n = grid.size();
    std::vector<double> w(n, 0.0);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double d = std::remainder(x - grid[k], two_pi);
        if (std::abs(d) < 1e-14) {
            std::fill(w.begin(), w.end(), 0.0);
            w[k] = 1.0;
            return w;
        }
        // periodic sinc for odd n, with the cot-correction for even n
        w[k] = (n % 2) ? std::sin(n * d / 2) / (n * std::sin(d / 2))
                       : std::sin(n * d / 2) / (n * std::tan(d / 2));
    }
    return w;
}

// Lagrange weights for 4-point (cubic) interpolation on an increasing grid, plus the
// difference to the 3-point weights as an error indicator.
struct LocalWeights {
    std::size_t first = 0;
    std::vector<double> w;
    std::vector<double> dw;
};

inline LocalWeights cubic_weights(const std::vector<double>& x, double t) {
    const std::size_t n = x.size();
    if (n < 4) throw GridTooCoarse("cubic interpolation needs at least 4 nodes");
    if (t < x.front() - 1e-12 || t > x.back() + 1e-12) throw GridTooCoarse("interpolation point outside the table");
    std::size_t j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    j = std::min(std::max<std::size_t>(j, 2), n - 2) - 2;
    LocalWeights lw;
    lw.first = j;
    for (int a = 0; a < 4; ++a)
        if (std::abs(t - x[j + a]) <= 1e-14 * std::max(1.0, std::abs(t))) {
            lw.w.assign(4, 0.0);
            lw.w[a] = 1.0;
            lw.dw.assign(4, 0.0);
            return lw;
        }
    lw.w.assign(4, 1.0);
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c)
            if (a != c) lw.w[a] *= (t - x[j + c]) / (x[j + a] - x[j + c]);
    std::vector<double> w3(4, 0.0);
    for (int a = 0; a < 3; ++a) {
        w3[a] = 1.0;
        for (int c = 0; c < 3; ++c)
            if (a != c) w3[a] *= (t - x[j + c]) / (x[j + a] - x[j + c]);
    }
    lw.dw.resize(4);
    for (int a = 0; a < 4; ++a) lw.dw[a] = lw.w[a] - w3[a];
    return lw;
}

} // namespace hypharm
