#pragma once

// Umbrella header for the corotype library.

#include "corotype/audit.hpp"
#include "corotype/engine.hpp"
#include "corotype/events.hpp"
#include "corotype/length.hpp"
#include "corotype/match.hpp"
#include "corotype/program.hpp"
#include "corotype/syntax.hpp"
#include "corotype/trace_io.hpp"
#include "corotype/types.hpp"
