#pragma once

// Umbrella header for the numerical library. The CLI layer (pucci/app/*)
// additionally needs nlohmann_json and is not included here.

#include "pucci/error.hpp"
#include "pucci/pucci_core.hpp"
#include "pucci/expr.hpp"
#include "pucci/pairs.hpp"
#include "pucci/ode.hpp"
#include "pucci/quadrature.hpp"
#include "pucci/kk_transform.hpp"
#include "pucci/properties.hpp"
#include "pucci/transform_checks.hpp"
#include "pucci/parallel.hpp"
#include "pucci/radial.hpp"
#include "pucci/dirichlet.hpp"
