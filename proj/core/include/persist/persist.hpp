#pragma once

#include "persist/critical.hpp"
#include "persist/environment.hpp"
#include "persist/error.hpp"
#include "persist/lyapunov.hpp"
#include "persist/meanfield.hpp"
#include "persist/model.hpp"
#include "persist/report.hpp"
#include "persist/rng.hpp"
#include "persist/simulator.hpp"
