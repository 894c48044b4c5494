#pragma once

#include "config.hpp"
#include "control.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "global_steer.hpp"
#include "integrator.hpp"
#include "io.hpp"
#include "model.hpp"
#include "moment_system.hpp"
#include "operators.hpp"
#include "quadrature.hpp"
#include "random.hpp"
#include "scenario.hpp"
#include "stabilization.hpp"
#include "taylor.hpp"
