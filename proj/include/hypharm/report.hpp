#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace hypharm {

// One residual row: identity name, probe descriptor, both sides of the identity.
struct ResidualReport {
    std::string identity_name;
    std::string probe_id;
    cplx lhs{0.0};
    cplx rhs{0.0};
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    double quad_estimate = 0.0;  // size of the cross-check or node-doubling difference, 0 if none
    double wall_time_ms = 0.0;

    static ResidualReport make(std::string name, std::string probe, cplx lhs, cplx rhs, double quad = 0.0) {
        ResidualReport r;
        r.identity_name = std::move(name);
        r.probe_id = std::move(probe);
        r.lhs = lhs;
        r.rhs = rhs;
        r.abs_residual = std::abs(lhs - rhs);
        r.rel_residual = r.abs_residual / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        r.quad_estimate = quad;
        return r;
    }
};

inline const char* residual_csv_header() {
    return "identity_name,probe_id,lhs_re,lhs_im,rhs_re,rhs_im,abs_residual,rel_residual,quad_estimate";
}

inline std::string residual_csv_row(const ResidualReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.identity_name.c_str(),
                  r.probe_id.c_str(), r.lhs.real(), r.lhs.imag(), r.rhs.real(), r.rhs.imag(), r.abs_residual,
                  r.rel_residual, r.quad_estimate);
    return buf;
}

inline void write_residual_csv(std::ostream& os, const std::vector<ResidualReport>& rows) {
    os << residual_csv_header() << "\n";
    for (const auto& r : rows) os << residual_csv_row(r) << "\n";
}

// Least-squares slope of log(err) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& err) {
    const std::size_t n = std::min(x.size(), err.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(err[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace hypharm
