#pragma once

#include <stdexcept>
#include <string>

namespace hypharm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateGeodesic : Error { using Error::Error; };
struct StencilOutOfDisc : Error { using Error::Error; };
struct TailTooFat : Error { using Error::Error; };
struct QuadratureNotConverged : Error { using Error::Error; };
struct GridTooCoarse : Error { using Error::Error; };
struct AnalyticStripExceeded : Error { using Error::Error; };
struct Mu0Pole : Error { using Error::Error; };
struct NumericalBlowup : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace hypharm
