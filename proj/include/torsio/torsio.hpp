#pragma once

#include "torsio/error.hpp"
#include "torsio/vec2.hpp"
#include "torsio/polygon.hpp"
#include "torsio/chebyshev.hpp"
#include "torsio/offset.hpp"
#include "torsio/shapes.hpp"
#include "torsio/quadrature.hpp"
#include "torsio/web_torsion.hpp"
#include "torsio/mesh.hpp"
#include "torsio/plaplace.hpp"
#include "torsio/bounds.hpp"
#include "torsio/shape_spec.hpp"
#include "torsio/io.hpp"
