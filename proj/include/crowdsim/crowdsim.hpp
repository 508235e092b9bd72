#pragma once

#include "crowdsim/batch_solver.hpp"
#include "crowdsim/engine.hpp"
#include "crowdsim/error.hpp"
#include "crowdsim/geometry.hpp"
#include "crowdsim/lp_solver.hpp"
#include "crowdsim/metrics.hpp"
#include "crowdsim/orca.hpp"
#include "crowdsim/random.hpp"
#include "crowdsim/scenario.hpp"
#include "crowdsim/simulation.hpp"
#include "crowdsim/spatial_grid.hpp"
#include "crowdsim/trace.hpp"
#include "crowdsim/worker_pool.hpp"
#include "crowdsim/oracles.hpp"
