#pragma once

#include "constants.hpp"
#include "errors.hpp"
#include "medium.hpp"
#include "medium_io.hpp"
#include "probe_state.hpp"
#include "combinatorics.hpp"
#include "interferometer.hpp"
#include "oracle.hpp"
#include "fisher.hpp"
#include "states.hpp"
#include "parallel.hpp"
#include "swarm.hpp"
#include "optimize.hpp"
