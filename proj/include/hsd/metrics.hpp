#pragma once

// Synchronization and task-count accounting, measured from execution plans
// and recomputed independently from the tiled graph.

#include "hsd/plan.hpp"
#include "hsd/schedule.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hsd {

/// A tile is interior when all 3^d − 1 neighbouring tiles of its node exist.
bool is_interior(const Prdg& g, std::size_t node, std::span<const std::int64_t> tile, std::span<const std::int64_t> s);

struct SyncProfile {
  std::size_t tiles = 0;
  std::size_t interior_tiles = 0;
  std::size_t procs = 0;
  /// Checks per interior tile; min == max when the count is uniform.
  std::size_t min_interior_checks = 0;
  std::size_t max_interior_checks = 0;
  std::size_t max_tiles_per_task = 0;
  std::size_t min_tiles_per_task = 0;
  std::size_t state_entries = 0;
};

/// What run_hsd will execute: coalesced checks per task, task list sizes.
SyncProfile measure_plan(const ExecutionPlan& plan, const Prdg& tiled);

/// Ground truth from dependence instances: distinct producer processors
/// other than the consumer's own, and tiles per processor under π.
SyncProfile enumerate_profile(const Prdg& tiled, const HsdSchedule& sch, std::span<const std::int64_t> s);

/// Checks per interior tile and tiles per task from the published
/// asymptotic table, where the benchmark appears in it.
struct TableFormula {
  std::size_t checks;
  std::string tiles_per_task;  // as printed, e.g. "(N/b)^2"
  std::int64_t (*tiles)(std::span<const std::int64_t> params);
};
std::optional<TableFormula> table_formula(std::string_view benchmark, std::string_view mapping);

struct FormulaComparison {
  std::string benchmark;
  std::string mapping;
  Point params;
  SyncProfile measured;
  SyncProfile truth;
  std::optional<TableFormula> formula;
  std::int64_t formula_tiles = 0;

  /// Measured against enumerated, and against the table when there are
  /// interior tiles at all.
  bool checks_match() const;
  bool tiles_match() const;
  std::string summary() const;
};

FormulaComparison metrics_against_formulas(std::string_view benchmark, std::string_view mapping, const Point& params);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hsd
