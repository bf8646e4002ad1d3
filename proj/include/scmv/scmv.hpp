// Umbrella header.
#pragma once

#include "scmv/baselines.hpp"
#include "scmv/bench.hpp"
#include "scmv/common.hpp"
#include "scmv/dataset.hpp"
#include "scmv/model.hpp"
#include "scmv/objective.hpp"
#include "scmv/stiefel.hpp"
