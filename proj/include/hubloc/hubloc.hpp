#pragma once

#include "hubloc/core.hpp"
#include "hubloc/costs.hpp"
#include "hubloc/simplex.hpp"
#include "hubloc/allocation.hpp"
#include "hubloc/search.hpp"
#include "hubloc/scenarios.hpp"
#include "hubloc/analysis.hpp"
#include "hubloc/io.hpp"
