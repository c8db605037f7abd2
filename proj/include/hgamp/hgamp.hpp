#pragma once

#include "construct.hpp"
#include "crossover.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "io.hpp"
#include "localsearch.hpp"
#include "model.hpp"
#include "population.hpp"
#include "repair.hpp"
#include "rng.hpp"
