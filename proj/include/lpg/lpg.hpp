#pragma once

// Umbrella header: text-embedding analysis for labeled property graphs.

#include "lpg/cache.hpp"
#include "lpg/config.hpp"
#include "lpg/dataset.hpp"
#include "lpg/embedding.hpp"
#include "lpg/errors.hpp"
#include "lpg/evaluation.hpp"
#include "lpg/forest.hpp"
#include "lpg/graph.hpp"
#include "lpg/ingest.hpp"
#include "lpg/knn.hpp"
#include "lpg/linear.hpp"
#include "lpg/model_io.hpp"
#include "lpg/remote.hpp"
#include "lpg/rng.hpp"
#include "lpg/tasks.hpp"
#include "lpg/textualize.hpp"
