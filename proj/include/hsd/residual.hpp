#pragma once

// Residual dependence graph: the part of every dependence that crosses
// virtual processors and so has to be enforced at run time.

#include "hsd/prdg.hpp"
#include "hsd/schedule.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hsd {

struct ResidualOptions {
  /// Concrete parameter values decide emptiness exactly; without them the
  /// decision is symbolic and Unknown pieces are kept.
  std::optional<Point> params;
  /// Keep every non-input pair unrestricted (statically ordered instances
  /// included).  A sound over-approximation, used for injection tests.
  bool keep_static = false;
};

/// Pairs into input nodes are dropped; every other pair is restricted to
/// D ∩ {π_X ≠ π_Y ∘ f}.  Empty pieces and edges disappear.  Each kept pair
/// records its source as "edge/pair" in `provenance`; hyper-edges are regrouped
/// by identical domain and named after the source edge.
Prdg residualize(const Prdg& g, const HsdSchedule& sch, const ResidualOptions& opts = {});

struct CoverageReport {
  std::size_t instances = 0;
  std::size_t static_ordered = 0;
  std::size_t residual = 0;
  /// Instances both statically ordered and residual (only with over-approximation).
  std::size_t both = 0;
  std::size_t uncovered_count = 0;
  std::vector<DependenceInstance> uncovered;
  bool covered() const { return uncovered_count == 0; }
};

/// Every non-input instance of g must be statically ordered or present in r.
CoverageReport coverage_check(const Prdg& g, const HsdSchedule& sch, const Prdg& r, std::span<const std::int64_t> s,
                              std::size_t max_witnesses = 16);

}  // namespace hsd
