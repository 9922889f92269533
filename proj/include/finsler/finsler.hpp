#pragma once

// Umbrella header for the Finsler metric measure workbench.

#include "finsler/config.hpp"
#include "finsler/curvature.hpp"
#include "finsler/dual.hpp"
#include "finsler/experiments.hpp"
#include "finsler/linalg.hpp"
#include "finsler/measure.hpp"
#include "finsler/metrics.hpp"
#include "finsler/norms.hpp"
#include "finsler/qmc.hpp"
#include "finsler/quadrature.hpp"
#include "finsler/quotients.hpp"
#include "finsler/report.hpp"
#include "finsler/sphere_search.hpp"
