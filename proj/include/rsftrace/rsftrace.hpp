#pragma once

#include "rsftrace/baselines.hpp"
#include "rsftrace/bench.hpp"
#include "rsftrace/dense.hpp"
#include "rsftrace/estimate_run.hpp"
#include "rsftrace/estimators.hpp"
#include "rsftrace/forest.hpp"
#include "rsftrace/generators.hpp"
#include "rsftrace/graph.hpp"
#include "rsftrace/graph_io.hpp"
#include "rsftrace/oracle.hpp"
#include "rsftrace/rng.hpp"
#include "rsftrace/solver.hpp"
#include "rsftrace/stratified.hpp"
