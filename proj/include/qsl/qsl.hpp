#pragma once

#include "qsl/bounds.hpp"
#include "qsl/brackets.hpp"
#include "qsl/diagnostics.hpp"
#include "qsl/dynamics.hpp"
#include "qsl/grid.hpp"
#include "qsl/metrics.hpp"
#include "qsl/oracles.hpp"
#include "qsl/states.hpp"
