#pragma once

#include "kdstrat/counter_rng.hpp"
#include "kdstrat/delaunay.hpp"
#include "kdstrat/discrepancy.hpp"
#include "kdstrat/error.hpp"
#include "kdstrat/harness.hpp"
#include "kdstrat/integrands.hpp"
#include "kdstrat/kdtree.hpp"
#include "kdstrat/parallel.hpp"
#include "kdstrat/sample_set.hpp"
#include "kdstrat/samplers.hpp"
#include "kdstrat/sobol_directions.hpp"
