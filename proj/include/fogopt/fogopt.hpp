#pragma once

#include "fogopt/errors.hpp"
#include "fogopt/rng.hpp"
#include "fogopt/jet.hpp"
#include "fogopt/model.hpp"
#include "fogopt/radio.hpp"
#include "fogopt/power.hpp"
#include "fogopt/surrogate.hpp"
#include "fogopt/metrics.hpp"
#include "fogopt/convex.hpp"
#include "fogopt/device_opt.hpp"
#include "fogopt/game.hpp"
#include "fogopt/oracle.hpp"
#include "fogopt/scenario.hpp"
#include "fogopt/csv.hpp"
#include "fogopt/experiments.hpp"
