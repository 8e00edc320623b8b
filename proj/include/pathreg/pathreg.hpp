#pragma once

// Umbrella header: simulation of irregular Gaussian paths, occupation
// measures and local times, Littlewood-Paley/Besov analysis, averaging
// operators for distributional drifts, sewing, and the nonlinear Young ODE
// solver with flow jets.

#include "pathreg/core/fft.hpp"
#include "pathreg/core/grid.hpp"
#include "pathreg/core/quadrature.hpp"
#include "pathreg/core/rng.hpp"

#include "pathreg/gauss/conditional.hpp"
#include "pathreg/gauss/covariance.hpp"
#include "pathreg/gauss/lnd.hpp"
#include "pathreg/gauss/model.hpp"
#include "pathreg/gauss/sample.hpp"

#include "pathreg/occupation/exponent.hpp"
#include "pathreg/occupation/interpolation.hpp"
#include "pathreg/occupation/local_time.hpp"
#include "pathreg/occupation/spectrum.hpp"

#include "pathreg/funcspaces/besov.hpp"
#include "pathreg/funcspaces/partition.hpp"

#include "pathreg/averaging/average.hpp"
#include "pathreg/averaging/drift.hpp"
#include "pathreg/averaging/norms.hpp"

#include "pathreg/sewing/sew.hpp"
#include "pathreg/sewing/stochastic.hpp"

#include "pathreg/yode/field.hpp"
#include "pathreg/yode/interp_field.hpp"
#include "pathreg/yode/solve.hpp"
