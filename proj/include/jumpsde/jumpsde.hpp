#pragma once

#include "jumpsde/cli.hpp"
#include "jumpsde/config.hpp"
#include "jumpsde/error.hpp"
#include "jumpsde/expression.hpp"
#include "jumpsde/fiber.hpp"
#include "jumpsde/grid.hpp"
#include "jumpsde/harness.hpp"
#include "jumpsde/measure.hpp"
#include "jumpsde/model.hpp"
#include "jumpsde/noise.hpp"
#include "jumpsde/parallel.hpp"
#include "jumpsde/presets.hpp"
#include "jumpsde/quadrature.hpp"
#include "jumpsde/random.hpp"
#include "jumpsde/report_io.hpp"
#include "jumpsde/scheme.hpp"
#include "jumpsde/stats.hpp"
