#pragma once

#include "fgw/errors.hpp"
#include "fgw/flo_core.hpp"
#include "fgw/random.hpp"
#include "fgw/spin_models.hpp"
#include "fgw/witness.hpp"
#include "fgw/measurement_sim.hpp"
#include "fgw/exact_oracle.hpp"
#include "fgw/io.hpp"
#include "fgw/experiments.hpp"
