#include "hsd/residual.hpp"

#include "hsd/error.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace hsd {

namespace {

bool piece_may_be_nonempty(const Prdg& g, const IoPair& pair, const ResidualOptions& opts) {
  const PolyUnion inst = instance_domain(g, pair);
  if (opts.params) return is_empty(inst, ParamBox::fixed(*opts.params)).status != Emptiness::Empty;
  return is_empty(inst).status != Emptiness::Empty;
}

}  // namespace

Prdg residualize(const Prdg& g, const HsdSchedule& sch, const ResidualOptions& opts) {
  if (opts.params && opts.params->size() != g.params.size()) {
    throw DimensionMismatch("residualize: wrong number of parameter values");
  }
  Prdg r;
  r.params = g.params;
  r.nodes = g.nodes;

  for (const auto& e : g.edges) {
    std::vector<HyperEdge> grouped;
    for (std::size_t pi = 0; pi < e.pairs.size(); ++pi) {
      const IoPair& pair = e.pairs[pi];
      if (g.is_input(pair.dst)) continue;
      const std::string prov = pair.provenance.empty() ? e.name + "/" + std::to_string(pi) : pair.provenance;
      std::vector<Polyhedron> pieces;
      if (opts.keep_static) {
        pieces.push_back(pair.domain);
      } else {
        const AffineMap pi_x = sch.pi(pair.src);
        const AffineMap pi_y = compose(sch.pi(pair.dst), pair.f);
        pieces = neq_set(pi_x, pi_y, pair.domain).pieces();
      }
      for (auto& piece : pieces) {
        IoPair kept{pair.src, pair.dst, std::move(piece), pair.f, prov};
        if (!piece_may_be_nonempty(g, kept, opts)) continue;
        auto it = std::find_if(grouped.begin(), grouped.end(), [&](const HyperEdge& h) { return h.domain == kept.domain; });
        if (it == grouped.end()) {
          grouped.push_back({"", e.src, kept.domain, {}});
          it = std::prev(grouped.end());
        }
        it->pairs.push_back(std::move(kept));
      }
    }
    for (std::size_t i = 0; i < grouped.size(); ++i) {
      grouped[i].name = grouped.size() == 1 ? e.name : e.name + "." + std::to_string(i + 1);
      r.edges.push_back(std::move(grouped[i]));
    }
  }
  return r;
}

CoverageReport coverage_check(const Prdg& g, const HsdSchedule& sch, const Prdg& r, std::span<const std::int64_t> s,
                              std::size_t max_witnesses) {
  // Residual instances keyed by (src, dst, consumer, producer).
  using Key = std::tuple<std::string, std::string, Point, Point>;
  std::set<Key> residual;
  for (const auto& e : r.edges) {
    for (const auto& pair : e.pairs) {
      const ConcreteAffineMap f(pair.f, s);
      for (const auto& z : enumerate_points(instance_domain(r, pair), s)) residual.emplace(pair.src, pair.dst, z, f.apply(z));
    }
  }

  CoverageReport rep;
  const std::size_t k = sch.k;
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    for (std::size_t pi = 0; pi < e.pairs.size(); ++pi) {
      const auto& pair = e.pairs[pi];
      if (g.is_input(pair.dst)) continue;
      const ConcreteAffineMap f(pair.f, s);
      const ConcreteAffineMap tx(sch.map_of(pair.src), s);
      const ConcreteAffineMap ty(sch.map_of(pair.dst), s);
      for (const auto& z : enumerate_points(instance_domain(g, pair), s)) {
        ++rep.instances;
        const Point y = f.apply(z);
        const Point a = tx.apply(z);
        const Point b = ty.apply(y);
        const std::span<const std::int64_t> sa(a), sb(b);
        const bool ordered = lex_compare(sa.first(k), sb.first(k)) == std::strong_ordering::equal &&
                             lex_compare(sa.subspan(k), sb.subspan(k)) == std::strong_ordering::greater;
        const bool in_r = residual.count({pair.src, pair.dst, z, y}) > 0;
        if (ordered) ++rep.static_ordered;
        if (in_r) ++rep.residual;
        if (ordered && in_r) ++rep.both;
        if (!ordered && !in_r) {
          if (rep.uncovered_count++ < max_witnesses) rep.uncovered.push_back({ei, pi, z, y});
        }
      }
    }
  }
  return rep;
}

}  // namespace hsd
