#ifndef ACGEO_ACGEO_HPP
#define ACGEO_ACGEO_HPP

// Umbrella header for the min-max geodesic toolkit on asymptotically conical
// manifolds.

#include "acgeo/ac_metric.hpp"
#include "acgeo/asymptotics.hpp"
#include "acgeo/cone_geometry.hpp"
#include "acgeo/core.hpp"
#include "acgeo/curve.hpp"
#include "acgeo/discrete_curve.hpp"
#include "acgeo/geodesic_flow.hpp"
#include "acgeo/io.hpp"
#include "acgeo/sweepout.hpp"
#include "acgeo/wedge_oracle.hpp"

#endif  // ACGEO_ACGEO_HPP
