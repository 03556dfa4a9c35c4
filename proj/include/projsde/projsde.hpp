#pragma once

// Structure-preserving stochastic integration: projection methods wrapping
// strong one-step SDE schemes so numerical solutions exactly preserve
// conserved quantities while keeping the supporting scheme's mean-square
// order. Includes the whole library.

#include "projsde/core/errors.hpp"
#include "projsde/core/linalg.hpp"
#include "projsde/core/model.hpp"
#include "projsde/core/state.hpp"
#include "projsde/core/verify.hpp"
#include "projsde/harness/report.hpp"
#include "projsde/harness/study.hpp"
#include "projsde/harness/sum.hpp"
#include "projsde/models/factory.hpp"
#include "projsde/models/kubo.hpp"
#include "projsde/models/lotka_volterra.hpp"
#include "projsde/models/pendulum.hpp"
#include "projsde/noise/brownian.hpp"
#include "projsde/noise/rng.hpp"
#include "projsde/noise/truncation.hpp"
#include "projsde/projection/project.hpp"
#include "projsde/schemes/config.hpp"
#include "projsde/schemes/discrete_gradient.hpp"
#include "projsde/schemes/steppers.hpp"
