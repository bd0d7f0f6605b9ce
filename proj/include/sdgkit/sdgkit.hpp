#pragma once

#include "convex_distance.hpp"
#include "delaunay.hpp"
#include "errors.hpp"
#include "generators.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "kinetic.hpp"
#include "neighbors.hpp"
#include "polygon_metric.hpp"
#include "polynomial.hpp"
#include "predicates.hpp"
#include "random.hpp"
#include "stable_graph.hpp"
#include "verify.hpp"
