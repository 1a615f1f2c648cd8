#pragma once

#include "locindep/error.hpp"
#include "locindep/format.hpp"
#include "locindep/expr.hpp"
#include "locindep/model.hpp"
#include "locindep/rng.hpp"
#include "locindep/parallel.hpp"
#include "locindep/simulate.hpp"
#include "locindep/characteristics.hpp"
#include "locindep/likelihood.hpp"
#include "locindep/graph.hpp"
#include "locindep/stats.hpp"
#include "locindep/optimize.hpp"
#include "locindep/inference.hpp"
#include "locindep/io.hpp"
#include "locindep/experiment.hpp"
