#pragma once

// Umbrella header: particle advection and point location on cell-centric
// adaptive-mesh-refinement data.

#include "amr.hpp"
#include "bench.hpp"
#include "bricks.hpp"
#include "dataset_io.hpp"
#include "errors.hpp"
#include "export.hpp"
#include "query.hpp"
#include "reconstruct.hpp"
#include "regions.hpp"
#include "rng.hpp"
#include "synth.hpp"
#include "tracer.hpp"
#include "vec.hpp"
