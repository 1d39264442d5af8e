#pragma once

#include "dpg_beam/analysis.hpp"
#include "dpg_beam/basis.hpp"
#include "dpg_beam/dpg_core.hpp"
#include "dpg_beam/exact_solution.hpp"
#include "dpg_beam/mesh.hpp"
#include "dpg_beam/quadrature.hpp"
#include "dpg_beam/study.hpp"
#include "dpg_beam/trace.hpp"
