#pragma once

// Concrete execution structures: the tile dependence graph of a tiled PRDG
// and, for a tile program, the per-processor task lists with their resolved
// state-table checks.

#include "hsd/instrument.hpp"
#include "hsd/prdg.hpp"

#include <map>
#include <string>
#include <vector>

namespace hsd {

struct TileRef {
  std::size_t node = 0;  // index into the PRDG's node list
  Point coords;
};

/// Non-input tiles of a PRDG at fixed parameters, sorted by (node, coords),
/// with deduplicated producer lists.
struct TileGraph {
  std::vector<std::string> node_names;
  std::vector<TileRef> tiles;
  std::vector<std::vector<std::size_t>> preds;
  std::size_t instances = 0;

  /// Index of a tile, or tiles.size() if absent.
  std::size_t find(std::size_t node, std::span<const std::int64_t> coords) const;

 private:
  friend TileGraph build_tile_graph(const Prdg&, std::span<const std::int64_t>);
  std::vector<std::map<Point, std::size_t>> index_;
};

TileGraph build_tile_graph(const Prdg& g, std::span<const std::int64_t> s);

/// Wait until state entry `entry` has counted at least `count` completed tiles.
struct Check {
  std::size_t entry = 0;
  std::int64_t count = 0;
  std::size_t clause = 0;  // first clause/target that produced it, for diagnostics
  std::size_t target = 0;
};

struct Task {
  std::size_t tile = 0;     // index into TileGraph::tiles
  std::size_t program_node = 0;
  std::size_t entry = 0;  // the state entry this task publishes to
  Point time;
  std::vector<Check> checks;
  std::size_t obligations = 0;  // before coalescing per producer entry
};

/// One state entry per (program node, processor) pair.  Its value counts the
/// processor's completed tiles of that node; `times` lists them in lex order,
/// so count c means the last completed time is times[c - 1].
struct StateEntry {
  std::size_t program_node = 0;
  Point proc;
  std::vector<Point> times;
};

struct ExecutionPlan {
  std::size_t n = 0;
  std::size_t k = 0;
  Point params;
  TileGraph graph;
  std::vector<std::string> program_nodes;
  std::vector<StateEntry> entries;
  /// Lex-sorted processors and each one's tasks in (time, node) order.
  std::vector<Point> procs;
  std::vector<std::vector<Task>> tasks;
  /// Space-time coordinates of every tile (graph order).
  std::vector<Point> spacetime;

  std::size_t task_count() const;
  std::size_t check_count() const;
};

/// `tiled` is the graph the kernel executes; `tp` its tile program.  Every
/// obligation must land on an existing producer tile at or after the
/// required time; anything else is an instrumentation error.
ExecutionPlan make_plan(const Prdg& tiled, const TileProgram& tp, std::span<const std::int64_t> s);

struct AuditReport {
  std::size_t instances = 0;
  std::size_t static_order = 0;
  std::size_t checked = 0;
  std::size_t missing_count = 0;
  std::vector<std::string> missing;  // first few, human readable
  bool complete() const { return missing_count == 0; }
};

/// Every tile dependence must be ordered inside one processor's task list
/// or covered by a check of the consumer's task that reaches the producer.
AuditReport audit_plan(const ExecutionPlan& plan, std::size_t max_reported = 16);

}  // namespace hsd
