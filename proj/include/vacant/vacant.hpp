#pragma once

#include "csv.hpp"
#include "error.hpp"
#include "lattice_green.hpp"
#include "montecarlo.hpp"
#include "numeric.hpp"
#include "random.hpp"
#include "rational_series.hpp"
#include "spectral.hpp"
#include "theory.hpp"
#include "torus.hpp"
#include "walk.hpp"
