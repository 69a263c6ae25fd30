#pragma once

#include "aoi_lab/core_model.hpp"
#include "aoi_lab/analytic.hpp"
#include "aoi_lab/rng.hpp"
#include "aoi_lab/stats.hpp"
#include "aoi_lab/simulator.hpp"
#include "aoi_lab/experiments.hpp"
#include "aoi_lab/report_io.hpp"
#include "aoi_lab/config.hpp"
#include "aoi_lab/validation.hpp"
