#pragma once

// Polyhedral reduced dependence graphs: nodes with integer domains and
// hyper-edges whose input-output pairs carry an affine dependence function.
// Edge domains are written relative to the source node: the instances of a
// pair are D ∩ dom(src).

#include "hsd/affine.hpp"
#include "hsd/expr.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsd {

struct PrdgNode {
  std::string name;
  std::vector<std::string> dims;
  PolyUnion domain;
  bool is_input = false;

  bool operator==(const PrdgNode&) const = default;
};

/// ⟨src, dst, domain, f⟩.  `provenance` names the source pair for derived
/// graphs ("e1/0") and is empty otherwise.
struct IoPair {
  std::string src;
  std::string dst;
  Polyhedron domain;
  AffineMap f;
  std::string provenance;

  bool operator==(const IoPair&) const = default;
};

struct HyperEdge {
  std::string name;
  std::string src;
  Polyhedron domain;
  std::vector<IoPair> pairs;

  bool operator==(const HyperEdge&) const = default;
};

struct Prdg {
  std::vector<std::string> params;
  std::vector<PrdgNode> nodes;
  std::vector<HyperEdge> edges;

  std::optional<std::size_t> find_node(std::string_view name) const;
  /// Throws ResolutionError.
  const PrdgNode& node(std::string_view name) const;
  std::size_t node_index(std::string_view name) const;
  Names names_of(std::string_view node) const;
  bool is_input(std::string_view node) const { return this->node(node).is_input; }

  bool operator==(const Prdg&) const = default;
};

/// D ∩ dom(src), one piece per piece of the source domain.
PolyUnion instance_domain(const Prdg& g, const IoPair& pair);

Prdg parse_prdg(std::string_view text);
Prdg load_prdg(const std::string& path);
std::string serialize_prdg(const Prdg& g);

/// Parameter values in declaration order; throws ResolutionError on a
/// missing or unknown name.
Point bind_params(const std::vector<std::string>& names, const std::map<std::string, std::int64_t>& values);

struct PrdgViolation {
  enum class Kind { OutOfDomain, SelfDependence };
  Kind kind;
  std::string edge;
  std::size_t pair = 0;
  Point witness;
  Point target;
  std::string message;
};

struct ValidationReport {
  std::vector<PrdgViolation> violations;
  std::vector<std::string> warnings;
  std::size_t instances = 0;
  bool clean() const { return violations.empty(); }
};

/// Enumerates every dependence instance at parameter values `s`.  At most
/// `max_witnesses` violations are recorded per pair.
ValidationReport validate_prdg(const Prdg& g, std::span<const std::int64_t> s, std::size_t max_witnesses = 8);

/// Tiles a graph of box domains with uniform dependences, at concrete
/// parameter values.  Tile index of point coordinate z_i is ⌊z_i / b_i⌋.  A
/// single tile size is broadcast to every dimension.  Pairs into input
/// nodes may also use constant coordinates (the live-in boundary).  The
/// result has no size parameters and dims suffixed with "_b".
Prdg tile_uniform(const Prdg& g, std::span<const std::int64_t> tile_sizes, std::span<const std::int64_t> s);

/// One dependence instance: the consumer point of `pair` and its producer.
struct DependenceInstance {
  std::size_t edge;
  std::size_t pair;
  Point consumer;
  Point producer;
};

/// Visits every instance D ∩ dom(src) of every pair, optionally skipping
/// pairs into input nodes.  Visitor returns false to stop.
void for_each_instance(const Prdg& g, std::span<const std::int64_t> s, bool skip_input,
                       const std::function<bool(const DependenceInstance&)>& visit);

}  // namespace hsd
