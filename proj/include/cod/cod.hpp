#pragma once

// Umbrella header.

#include "cod/baselines.hpp"
#include "cod/cooccurring.hpp"
#include "cod/counter_rng.hpp"
#include "cod/errors.hpp"
#include "cod/evaluation.hpp"
#include "cod/frequent_directions.hpp"
#include "cod/sketch_length.hpp"
#include "cod/sketch_types.hpp"
#include "cod/stream_io.hpp"
#include "cod/verify.hpp"
