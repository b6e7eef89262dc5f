#pragma once

// Umbrella header for the drifting-games online learning library.

#include "dgames/bandit.hpp"
#include "dgames/boosting.hpp"
#include "dgames/dataio.hpp"
#include "dgames/drift_sim.hpp"
#include "dgames/hedge.hpp"
#include "dgames/oco.hpp"
#include "dgames/potentials.hpp"
#include "dgames/rng.hpp"
#include "dgames/verify.hpp"
