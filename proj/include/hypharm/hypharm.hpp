#pragma once

// Umbrella header for the library modules. The verify driver pieces (suites.hpp, runner.hpp)
// are included separately.

#include "errors.hpp"
#include "fixtures.hpp"
#include "geometry.hpp"
#include "harmonic.hpp"
#include "intertwiner.hpp"
#include "parallel.hpp"
#include "psradon.hpp"
#include "quadrature.hpp"
#include "quantization.hpp"
#include "report.hpp"
#include "special.hpp"
#include "spectral_table.hpp"
#include "transforms.hpp"
