#pragma once

// Convenience umbrella: pulls in the whole library.

#include "hawkes/background.hpp"
#include "hawkes/branching.hpp"
#include "hawkes/calendar.hpp"
#include "hawkes/config.hpp"
#include "hawkes/csv_io.hpp"
#include "hawkes/diagnostics.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/event_log.hpp"
#include "hawkes/gibbs.hpp"
#include "hawkes/ingest.hpp"
#include "hawkes/intensity.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/likelihood.hpp"
#include "hawkes/matrix.hpp"
#include "hawkes/params.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/scenarios.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/slice.hpp"
#include "hawkes/stability.hpp"
#include "hawkes/summary_stats.hpp"
