#pragma once

// Umbrella header: dense nonlinear semidefinite programming toolkit.

#include "nsdp/sym_matrix.hpp"   // IWYU pragma: export
#include "nsdp/spectral.hpp"     // IWYU pragma: export
#include "nsdp/problem.hpp"      // IWYU pragma: export
#include "nsdp/merit.hpp"        // IWYU pragma: export
#include "nsdp/lagrangian.hpp"   // IWYU pragma: export
#include "nsdp/subspace.hpp"     // IWYU pragma: export
#include "nsdp/certify.hpp"      // IWYU pragma: export
#include "nsdp/solver.hpp"       // IWYU pragma: export
#include "nsdp/robinson.hpp"     // IWYU pragma: export
