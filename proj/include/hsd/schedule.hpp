#pragma once

// Hybrid static/dynamic schedules: one bijective map θ = (π, τ) per node
// into a shared n-dimensional space-time whose first k coordinates name a
// virtual processor.

#include "hsd/affine.hpp"
#include "hsd/prdg.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hsd {

struct HsdSchedule {
  std::size_t n = 0;
  std::size_t k = 0;
  std::map<std::string, AffineMap> theta;
  std::map<std::string, AffineMap> theta_inv;

  const AffineMap& map_of(std::string_view node) const;
  const AffineMap& inverse_of(std::string_view node) const;
  AffineMap pi(std::string_view node) const { return map_of(node).slice(0, k); }
  AffineMap tau(std::string_view node) const { return map_of(node).slice(k, n - k); }
};

/// Checks (n, k), node coverage and unimodularity.  A node without a map
/// gets the identity when its dimension equals n; otherwise ScheduleError.
HsdSchedule make_schedule(const Prdg& g, std::size_t n, std::size_t k, std::map<std::string, AffineMap> maps);
HsdSchedule parse_schedule(std::string_view text, const Prdg& g);
HsdSchedule load_schedule(const std::string& path, const Prdg& g);
std::string serialize_schedule(const HsdSchedule& sch, const Prdg& g);

enum class Verdict { Legal, Violations, Unproven };

struct ScheduleViolation {
  std::string edge;
  std::size_t pair = 0;
  std::string dst;
  Point witness;
  Point params;
  Point pi_src;
  Point pi_dst;
  Point tau_src;
  Point tau_dst;
};

struct LegalityReport {
  Verdict status = Verdict::Legal;
  std::vector<ScheduleViolation> violations;
  /// Pairs whose symbolic check ended in Unknown.
  std::vector<std::string> unproven;
  std::size_t checked_instances = 0;
  std::size_t violation_count = 0;
  bool legal() const { return status == Verdict::Legal; }
};

/// π_X(z) = π_Y(f(z)) ⇒ τ_X(z) ≻ τ_Y(f(z)) on every instance of every pair
/// not targeting an input node, by enumeration at `s`.
LegalityReport check_partial_legality(const Prdg& g, const HsdSchedule& sch, std::span<const std::int64_t> s,
                                      std::size_t max_witnesses = 16);
/// Same condition for all parameter values, via emptiness of the violation set.
LegalityReport check_partial_legality_symbolic(const Prdg& g, const HsdSchedule& sch);

/// π_X(z) ⪰ π_Y(f(z)) on every residual instance.
LegalityReport check_deadlock_freedom(const Prdg& residual, const HsdSchedule& sch, std::span<const std::int64_t> s,
                                      std::size_t max_witnesses = 16);
LegalityReport check_deadlock_freedom_symbolic(const Prdg& residual, const HsdSchedule& sch);

/// {z ∈ d | a(z) ≺ b(z)}, or ⪯ with `or_equal`, as disjoint pieces.
PolyUnion lex_less_set(const AffineMap& a, const AffineMap& b, const Polyhedron& d, bool or_equal);

/// Graph in space-time coordinates: node domains are θ-images, pair maps
/// are θ_Y ∘ f ∘ θ_X⁻¹ and edge domains are rewritten through θ_X⁻¹.
struct SpaceTimePrdg {
  Prdg graph;
  std::size_t n = 0;
  std::size_t k = 0;
  /// θ⁻¹ per node: space-time point back to original coordinates.
  std::map<std::string, AffineMap> inverse;

  AffineMap proc_part(const IoPair& p) const { return p.f.slice(0, k); }
  AffineMap time_part(const IoPair& p) const { return p.f.slice(k, n - k); }
};

/// Space-time dimension names: p0.. then t0...
std::vector<std::string> spacetime_dims(std::size_t n, std::size_t k);

SpaceTimePrdg reindex_to_spacetime(const Prdg& g, const HsdSchedule& sch);

}  // namespace hsd
