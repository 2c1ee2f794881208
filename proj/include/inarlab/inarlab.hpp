#pragma once

// inarlab: simulation, estimation, and bootstrap inference for INAR(p)
// count time series, p in {1, 2}.

#include "inarlab/bootstrap.hpp"
#include "inarlab/errors.hpp"
#include "inarlab/estimate_parametric.hpp"
#include "inarlab/estimate_semiparametric.hpp"
#include "inarlab/family.hpp"
#include "inarlab/io.hpp"
#include "inarlab/likelihood.hpp"
#include "inarlab/model.hpp"
#include "inarlab/optimize.hpp"
#include "inarlab/pmf.hpp"
#include "inarlab/rng.hpp"
#include "inarlab/simulate.hpp"
#include "inarlab/version.hpp"
