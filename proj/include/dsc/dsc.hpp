#pragma once

#include "dsc/benchmark/illustrative.hpp"
#include "dsc/benchmark/special_functions.hpp"
#include "dsc/core/feasibility.hpp"
#include "dsc/core/normal_generator.hpp"
#include "dsc/core/process_model.hpp"
#include "dsc/core/rng.hpp"
#include "dsc/core/run_stats.hpp"
#include "dsc/core/types.hpp"
#include "dsc/io/number_format.hpp"
#include "dsc/io/samples_csv.hpp"
#include "dsc/io/uncertainty_csv.hpp"
#include "dsc/mc/monte_carlo.hpp"
#include "dsc/mc/sobol.hpp"
#include "dsc/ns/ellipsoid.hpp"
#include "dsc/ns/nested_sampler.hpp"
#include "dsc/surrogate/mlp.hpp"
#include "dsc/surrogate/mlp_json.hpp"
