#pragma once

#include "cpareto/bundle.hpp"
#include "cpareto/coalitions.hpp"
#include "cpareto/error.hpp"
#include "cpareto/evomoo.hpp"
#include "cpareto/fronts_io.hpp"
#include "cpareto/games.hpp"
#include "cpareto/hypervolume.hpp"
#include "cpareto/lpsolve.hpp"
#include "cpareto/matrix.hpp"
#include "cpareto/parallel.hpp"
#include "cpareto/pareto.hpp"
#include "cpareto/physics.hpp"
#include "cpareto/random.hpp"
#include "cpareto/scenario_io.hpp"
#include "cpareto/strategy.hpp"
