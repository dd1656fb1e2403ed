#pragma once

#include "errors.hpp"
#include "fitting.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "lobes.hpp"
#include "materials.hpp"
#include "quadrature.hpp"
#include "raytrace.hpp"
#include "scan.hpp"
#include "special.hpp"
#include "units.hpp"
#include "vec3.hpp"
#include "version.hpp"
