#pragma once

// Umbrella header: numerical laboratory for second-order parabolic systems
// on the periodic box. Gaussian proxy kernels, Green/semigroup operators,
// Feynman-Kac Monte Carlo, fixed-point solvers and the explicit a-priori
// bound chains they are checked against.

#include "heatlab/core/field.hpp"
#include "heatlab/core/grid.hpp"
#include "heatlab/core/io.hpp"
#include "heatlab/core/norms.hpp"
#include "heatlab/core/random_fields.hpp"
#include "heatlab/core/spectral.hpp"
#include "heatlab/bounds/chains.hpp"
#include "heatlab/bounds/lemmas.hpp"
#include "heatlab/kernel/diffusion.hpp"
#include "heatlab/kernel/gaussian.hpp"
#include "heatlab/kernel/propagator.hpp"
#include "heatlab/kernel/scaling_probe.hpp"
#include "heatlab/mc/counter_rng.hpp"
#include "heatlab/mc/feynman_kac.hpp"
#include "heatlab/ns/leray.hpp"
#include "heatlab/ns/semi_ns.hpp"
#include "heatlab/solve/coefficients.hpp"
#include "heatlab/solve/envelope_check.hpp"
#include "heatlab/solve/fixed_point.hpp"
#include "heatlab/solve/linear.hpp"
#include "heatlab/solve/operators.hpp"
#include "heatlab/lab/calibration.hpp"
#include "heatlab/lab/config.hpp"
#include "heatlab/lab/experiments.hpp"
#include "heatlab/lab/reference_solutions.hpp"
