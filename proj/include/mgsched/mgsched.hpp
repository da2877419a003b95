#pragma once

#include "mgsched/cli.hpp"
#include "mgsched/config.hpp"
#include "mgsched/demand.hpp"
#include "mgsched/engine.hpp"
#include "mgsched/error.hpp"
#include "mgsched/lp.hpp"
#include "mgsched/lp_format.hpp"
#include "mgsched/mip.hpp"
#include "mgsched/model.hpp"
#include "mgsched/profiles.hpp"
#include "mgsched/report.hpp"
#include "mgsched/rng.hpp"
#include "mgsched/solve.hpp"
#include "mgsched/system.hpp"
#include "mgsched/textio.hpp"
