#pragma once

#include "core_model.hpp"
#include "rng.hpp"
#include "parallel.hpp"
#include "intervals.hpp"
#include "simplex.hpp"
#include "lp_relaxation.hpp"
#include "planner.hpp"
#include "oracle.hpp"
#include "gamma.hpp"
#include "analysis.hpp"
#include "learning.hpp"
#include "io.hpp"
#include "acceptance.hpp"
