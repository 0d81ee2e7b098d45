#ifndef MEP_MEP_HPP
#define MEP_MEP_HPP

#include "mep/converse.hpp"
#include "mep/distmodel.hpp"
#include "mep/error.hpp"
#include "mep/format.hpp"
#include "mep/harness.hpp"
#include "mep/meplot.hpp"
#include "mep/policy.hpp"
#include "mep/quadrature.hpp"
#include "mep/regime.hpp"
#include "mep/rng.hpp"
#include "mep/sample.hpp"
#include "mep/setgeom.hpp"

#endif  // MEP_MEP_HPP
