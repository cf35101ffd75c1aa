#pragma once

/// Umbrella header for the simulation library (JSON helpers live in
/// billiards/config.hpp and billiards/io.hpp).

#include "billiards/coords.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/ergodic.hpp"
#include "billiards/estimate.hpp"
#include "billiards/expected.hpp"
#include "billiards/geometry.hpp"
#include "billiards/holography.hpp"
#include "billiards/lyapunov.hpp"
#include "billiards/measure.hpp"
#include "billiards/parallel.hpp"
#include "billiards/presets.hpp"
#include "billiards/rng.hpp"
#include "billiards/space.hpp"
#include "billiards/table.hpp"
#include "billiards/vec.hpp"
