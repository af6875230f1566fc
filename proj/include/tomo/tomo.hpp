#pragma once

// Umbrella header for the tomography library.

#include "tomo/basis.hpp"
#include "tomo/bench.hpp"
#include "tomo/errors.hpp"
#include "tomo/estimator.hpp"
#include "tomo/io.hpp"
#include "tomo/matrix.hpp"
#include "tomo/measurement.hpp"
#include "tomo/mle.hpp"
#include "tomo/rng.hpp"
#include "tomo/sampling.hpp"
#include "tomo/states.hpp"
