#pragma once

// Umbrella header: behaviour-tree engine, task DSL, vote fusion, the lab
// task simulator and the Monte Carlo harness.

#include "mmbt/core/blackboard.hpp"
#include "mmbt/core/clock.hpp"
#include "mmbt/core/engine.hpp"
#include "mmbt/core/status.hpp"
#include "mmbt/core/timeseries.hpp"
#include "mmbt/core/trace.hpp"
#include "mmbt/core/tree.hpp"
#include "mmbt/dsl/diagnostics.hpp"
#include "mmbt/dsl/parse.hpp"
#include "mmbt/dsl/serialize.hpp"
#include "mmbt/dsl/validate.hpp"
#include "mmbt/errors.hpp"
#include "mmbt/fusion/fusion.hpp"
#include "mmbt/harness/config.hpp"
#include "mmbt/harness/report.hpp"
#include "mmbt/harness/runner.hpp"
#include "mmbt/harness/stats.hpp"
#include "mmbt/rng.hpp"
#include "mmbt/sim/signal.hpp"
#include "mmbt/sim/surrogate.hpp"
#include "mmbt/sim/tasks.hpp"
#include "mmbt/sim/worlds.hpp"
