#pragma once

// Graph + schedule -> residual -> tile program, in one step.

#include "hsd/instrument.hpp"
#include "hsd/kernels.hpp"
#include "hsd/plan.hpp"
#include "hsd/residual.hpp"
#include "hsd/schedule.hpp"

namespace hsd {

struct Pipeline {
  Prdg graph;
  HsdSchedule schedule;
  Prdg residual;
  TileProgram program;
};

Pipeline compile_pipeline(Prdg g, HsdSchedule sch, const ResidualOptions& opts = {});

/// Loads a shipped benchmark's tiled graph and mapping schedule.
Pipeline load_benchmark(std::string_view benchmark, std::string_view mapping, const ResidualOptions& opts = {});

/// Tile program with extra obligations for every statically ordered
/// non-input dependence, on top of the residual ones.
TileProgram overapproximated_program(const Pipeline& p);

}  // namespace hsd
