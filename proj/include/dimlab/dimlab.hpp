#pragma once

#include "dimlab/config.hpp"
#include "dimlab/datagen.hpp"
#include "dimlab/dataset_io.hpp"
#include "dimlab/error.hpp"
#include "dimlab/experiment_config.hpp"
#include "dimlab/harness.hpp"
#include "dimlab/linalg.hpp"
#include "dimlab/metrics.hpp"
#include "dimlab/mlp.hpp"
#include "dimlab/mlp_io.hpp"
#include "dimlab/rng.hpp"
#include "dimlab/solvers.hpp"
#include "dimlab/svg_plot.hpp"
