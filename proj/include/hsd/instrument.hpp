#pragma once

// Executable tile program: per node, acquire clauses checked before the tile
// runs, and a single update publishing the tile's time on its processor.

#include "hsd/schedule.hpp"

#include <string>
#include <vector>

namespace hsd {

/// Producer Y at processor proc(p, t) must have reached time(p, t).
struct ClauseTarget {
  std::string node;
  AffineMap proc;
  AffineMap time;
  std::string origin;

  bool operator==(const ClauseTarget&) const = default;
};

struct AcquireClause {
  std::string edge;
  Polyhedron domain;  // over (p, t)
  std::vector<ClauseTarget> targets;

  bool operator==(const AcquireClause&) const = default;
};

struct TileNode {
  std::string name;
  PolyUnion domain;    // over (p, t)
  AffineMap to_tile;   // θ⁻¹: (p, t) -> tile coordinates
  std::vector<AcquireClause> clauses;

  bool operator==(const TileNode&) const = default;
};

struct TileProgram {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::string> params;
  std::vector<std::string> dims;
  std::vector<TileNode> nodes;
  PolyUnion update_domain;

  std::size_t node_index(std::string_view name) const;
  std::size_t clause_count() const;
  bool operator==(const TileProgram&) const = default;
};

/// `residual` must be reindexed into the same space-time as `program`.
/// Input nodes are not executed and get no entry.
TileProgram build_tile_program(const SpaceTimePrdg& program, const SpaceTimePrdg& residual);

struct Obligation {
  std::size_t clause = 0;
  std::size_t target = 0;
  std::size_t producer = 0;  // node index in the TileProgram
  Point proc;
  Point time;

  bool operator==(const Obligation&) const = default;
};

/// The program with parameters substituted, for repeated evaluation.
class CompiledProgram {
 public:
  CompiledProgram(const TileProgram& tp, std::span<const std::int64_t> s);

  /// Appends the obligations of tile (p, t) of `node` to `out`.
  void obligations(std::size_t node, std::span<const std::int64_t> p, std::span<const std::int64_t> t,
                   std::vector<Obligation>& out) const;
  Point tile_coords(std::size_t node, std::span<const std::int64_t> pt) const;

 private:
  struct Target {
    std::size_t producer;
    ConcreteAffineMap proc;
    ConcreteAffineMap time;
  };
  struct Clause {
    ConcretePolyhedron domain;
    std::vector<Target> targets;
  };
  std::size_t n_;
  std::size_t k_;
  std::vector<std::vector<Clause>> clauses_;
  std::vector<ConcreteAffineMap> to_tile_;
};

std::vector<Obligation> acquire_obligations(const TileProgram& tp, std::size_t node, std::span<const std::int64_t> p,
                                            std::span<const std::int64_t> t, std::span<const std::int64_t> s);

/// Copy of `tp` without the named clause ("node:index" or an edge name).
TileProgram drop_clause(const TileProgram& tp, const std::string& which);

std::string serialize_tile_program(const TileProgram& tp);

}  // namespace hsd
