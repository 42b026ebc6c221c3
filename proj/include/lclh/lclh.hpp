#pragma once

#include "lclh/core.hpp"
#include "lclh/qlinalg.hpp"
#include "lclh/random.hpp"
#include "lclh/observables.hpp"
#include "lclh/hamiltonian.hpp"
#include "lclh/consistency.hpp"
#include "lclh/convex_engine.hpp"
#include "lclh/reductions.hpp"
#include "lclh/alternatives.hpp"
#include "lclh/instance_io.hpp"
#include "lclh/generate.hpp"
#include "lclh/suites.hpp"
