// Umbrella header.
#pragma once

#include "types.hpp"
#include "linalg.hpp"
#include "geometry.hpp"
#include "sampling.hpp"
#include "potentials.hpp"
#include "hypotheses.hpp"
#include "mesh.hpp"
#include "fem.hpp"
#include "eigensolve.hpp"
#include "quadrature.hpp"
#include "identities.hpp"
#include "extrapolate.hpp"
#include "verify.hpp"
#include "scenario.hpp"
#include "report.hpp"
#include "gallery.hpp"
