#pragma once

#include "filament/detectability.hpp"
#include "filament/detector.hpp"
#include "filament/error.hpp"
#include "filament/grid.hpp"
#include "filament/grid_io.hpp"
#include "filament/normal.hpp"
#include "filament/path_dp.hpp"
#include "filament/rho.hpp"
#include "filament/scan_dp.hpp"
#include "filament/simulator.hpp"
