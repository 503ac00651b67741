#include "hsd/schedule.hpp"

#include "hsd/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace hsd {

using json = nlohmann::json;

const AffineMap& HsdSchedule::map_of(std::string_view node) const {
  auto it = theta.find(std::string(node));
  if (it == theta.end()) throw ResolutionError("schedule has no map for node '" + std::string(node) + "'", std::string(node));
  return it->second;
}

const AffineMap& HsdSchedule::inverse_of(std::string_view node) const {
  auto it = theta_inv.find(std::string(node));
  if (it == theta_inv.end()) {
    throw ResolutionError("schedule has no map for node '" + std::string(node) + "'", std::string(node));
  }
  return it->second;
}

HsdSchedule make_schedule(const Prdg& g, std::size_t n, std::size_t k, std::map<std::string, AffineMap> maps) {
  if (k > n) throw ScheduleError("processor dimensions k = " + std::to_string(k) + " exceed n = " + std::to_string(n));
  for (const auto& [name, f] : maps) g.node(name);
  HsdSchedule sch;
  sch.n = n;
  sch.k = k;
  for (const auto& node : g.nodes) {
    auto it = maps.find(node.name);
    AffineMap f;
    if (it != maps.end()) {
      f = it->second;
    } else if (node.is_input && node.dims.size() == n) {
      f = AffineMap::identity(n, g.params.size());
    } else {
      throw ScheduleError("schedule has no map for node '" + node.name + "'");
    }
    if (f.in_dim() != node.dims.size()) {
      throw ScheduleError("map for node '" + node.name + "' takes " + std::to_string(f.in_dim()) + " indices, node has " +
                          std::to_string(node.dims.size()));
    }
    if (f.out_dim() != n) {
      throw ScheduleError("map for node '" + node.name + "' has " + std::to_string(f.out_dim()) +
                          " rows, expected n = " + std::to_string(n));
    }
    if (f.n_params() != g.params.size()) throw ScheduleError("map for node '" + node.name + "' has the wrong parameter count");
    sch.theta_inv[node.name] = invert(f);
    sch.theta[node.name] = std::move(f);
  }
  return sch;
}

HsdSchedule parse_schedule(std::string_view text, const Prdg& g) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("schedule: ") + e.what());
  }
  auto count = [&](const char* key) -> std::size_t {
    if (!j.is_object() || !j.contains(key) || !j[key].is_number_unsigned()) {
      throw ParseError(std::string("schedule: missing or invalid \"") + key + "\"");
    }
    return j[key].get<std::size_t>();
  };
  const std::size_t n = count("n");
  const std::size_t k = count("k");
  if (!j.contains("maps") || !j["maps"].is_object()) throw ParseError("schedule: missing \"maps\" object");
  std::map<std::string, AffineMap> maps;
  for (const auto& [name, body] : j["maps"].items()) {
    if (!body.is_object() || !body.contains("rows") || !body["rows"].is_array()) {
      throw ParseError("schedule: maps." + name + " needs a \"rows\" array");
    }
    std::vector<std::string> rows;
    for (const auto& r : body["rows"]) {
      if (!r.is_string()) throw ParseError("schedule: maps." + name + ".rows must be strings");
      rows.push_back(r.get<std::string>());
    }
    try {
      maps.emplace(name, parse_map(rows, g.names_of(name)));
    } catch (const ParseError& e) {
      throw ParseError("schedule: maps." + name + ": " + e.what());
    }
  }
  return make_schedule(g, n, k, std::move(maps));
}

HsdSchedule load_schedule(const std::string& path, const Prdg& g) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_schedule(ss.str(), g);
}

std::string serialize_schedule(const HsdSchedule& sch, const Prdg& g) {
  nlohmann::ordered_json j;
  j["n"] = sch.n;
  j["k"] = sch.k;
  j["maps"] = nlohmann::ordered_json::object();
  for (const auto& node : g.nodes) {
    const AffineMap& f = sch.map_of(node.name);
    if (node.is_input && f.is_identity()) continue;
    j["maps"][node.name]["rows"] = format_map(f, g.names_of(node.name));
  }
  return j.dump(2) + "\n";
}

// ------------------------------------------------------------------ checks

PolyUnion lex_less_set(const AffineMap& a, const AffineMap& b, const Polyhedron& d, bool or_equal) {
  if (a.out_dim() != b.out_dim() || a.in_dim() != d.dim() || b.in_dim() != d.dim()) {
    throw DimensionMismatch("lex_less_set: maps and domain disagree on dimensions");
  }
  const std::size_t n = d.dim();
  const std::size_t np = d.n_params();
  auto diff = [&](std::size_t i, const Int& shift, ConstraintKind kind) {
    // b_i − a_i + shift
    Constraint c{IntVec(n), IntVec(np), b.offset()[i] - a.offset()[i] + shift, kind};
    for (std::size_t j = 0; j < n; ++j) c.a[j] = b.linear()(i, j) - a.linear()(i, j);
    for (std::size_t j = 0; j < np; ++j) c.b[j] = b.param()(i, j) - a.param()(i, j);
    return c;
  };
  PolyUnion out(n, np);
  Polyhedron base = d;
  for (std::size_t i = 0; i < a.out_dim(); ++i) {
    Polyhedron piece = base;
    piece.add(diff(i, -1, ConstraintKind::Inequality));  // a_i ≤ b_i − 1
    piece = piece.simplified();
    if (!piece.trivially_empty()) out.add(std::move(piece));
    base.add(diff(i, 0, ConstraintKind::Equality));
    base = base.simplified();
    if (base.trivially_empty()) return out;
  }
  if (or_equal) out.add(std::move(base));
  return out;
}

namespace {

Polyhedron equal_set(const AffineMap& a, const AffineMap& b, const Polyhedron& d) {
  Polyhedron out = d;
  for (std::size_t i = 0; i < a.out_dim(); ++i) {
    Constraint c{IntVec(d.dim()), IntVec(d.n_params()), a.offset()[i] - b.offset()[i], ConstraintKind::Equality};
    for (std::size_t j = 0; j < d.dim(); ++j) c.a[j] = a.linear()(i, j) - b.linear()(i, j);
    for (std::size_t j = 0; j < d.n_params(); ++j) c.b[j] = a.param()(i, j) - b.param()(i, j);
    out.add(std::move(c));
  }
  return out.simplified();
}

Point head(const Point& v, std::size_t k) { return Point(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k)); }
Point tail(const Point& v, std::size_t k) { return Point(v.begin() + static_cast<std::ptrdiff_t>(k), v.end()); }

// Shared driver for both enumeration checks.  `bad(src_st, dst_st)` decides
// whether an instance violates the condition.
template <typename Bad>
LegalityReport enumerate_check(const Prdg& g, const HsdSchedule& sch, std::span<const std::int64_t> s,
                               std::size_t max_witnesses, Bad bad) {
  LegalityReport rep;
  for (const auto& e : g.edges) {
    for (std::size_t pi = 0; pi < e.pairs.size(); ++pi) {
      const auto& pair = e.pairs[pi];
      if (g.is_input(pair.dst)) continue;
      const ConcreteAffineMap tx(sch.map_of(pair.src), s);
      const ConcreteAffineMap ty(compose(sch.map_of(pair.dst), pair.f), s);
      std::size_t recorded = 0;
      for (const auto& z : enumerate_points(instance_domain(g, pair), s)) {
        ++rep.checked_instances;
        const Point a = tx.apply(z);
        const Point b = ty.apply(z);
        if (!bad(a, b)) continue;
        ++rep.violation_count;
        if (recorded++ < max_witnesses) {
          rep.violations.push_back({e.name, pi, pair.dst, z, Point(s.begin(), s.end()), head(a, sch.k), head(b, sch.k),
                                    tail(a, sch.k), tail(b, sch.k)});
        }
      }
    }
  }
  rep.status = rep.violation_count ? Verdict::Violations : Verdict::Legal;
  return rep;
}

template <typename BuildSet>
LegalityReport symbolic_check(const Prdg& g, const HsdSchedule& sch, BuildSet build) {
  LegalityReport rep;
  for (const auto& e : g.edges) {
    for (std::size_t pi = 0; pi < e.pairs.size(); ++pi) {
      const auto& pair = e.pairs[pi];
      if (g.is_input(pair.dst)) continue;
      const AffineMap& tx = sch.map_of(pair.src);
      const AffineMap ty = compose(sch.map_of(pair.dst), pair.f);
      PolyUnion bad(tx.in_dim(), g.params.size());
      const PolyUnion instances = instance_domain(g, pair);
      for (const auto& piece : instances.pieces()) {
        const PolyUnion part = build(tx, ty, piece);
        for (const auto& p : part.pieces()) bad.add(p);
      }
      const EmptinessResult r = is_empty(bad);
      if (r.status == Emptiness::NonEmpty) {
        const IntVec sv = to_int_vec(r.params);
        const IntVec zv = to_int_vec(r.witness);
        const Point a = to_point(tx.apply(std::span<const Int>(zv), std::span<const Int>(sv)));
        const Point b = to_point(ty.apply(std::span<const Int>(zv), std::span<const Int>(sv)));
        ++rep.violation_count;
        rep.violations.push_back(
            {e.name, pi, pair.dst, r.witness, r.params, head(a, sch.k), head(b, sch.k), tail(a, sch.k), tail(b, sch.k)});
      } else if (r.status == Emptiness::Unknown) {
        rep.unproven.push_back(e.name + "/" + std::to_string(pi));
      }
    }
  }
  rep.status = rep.violation_count ? Verdict::Violations : rep.unproven.empty() ? Verdict::Legal : Verdict::Unproven;
  return rep;
}

}  // namespace

LegalityReport check_partial_legality(const Prdg& g, const HsdSchedule& sch, std::span<const std::int64_t> s,
                                      std::size_t max_witnesses) {
  const std::size_t k = sch.k;
  return enumerate_check(g, sch, s, max_witnesses, [k](const Point& a, const Point& b) {
    const std::span<const std::int64_t> sa(a), sb(b);
    if (lex_compare(sa.first(k), sb.first(k)) != std::strong_ordering::equal) return false;
    return lex_compare(sa.subspan(k), sb.subspan(k)) != std::strong_ordering::greater;
  });
}

LegalityReport check_partial_legality_symbolic(const Prdg& g, const HsdSchedule& sch) {
  const std::size_t k = sch.k;
  const std::size_t n = sch.n;
  return symbolic_check(g, sch, [k, n](const AffineMap& tx, const AffineMap& ty, const Polyhedron& d) {
    const Polyhedron same_proc = equal_set(tx.slice(0, k), ty.slice(0, k), d);
    if (same_proc.trivially_empty()) return PolyUnion(d.dim(), d.n_params());
    return lex_less_set(tx.slice(k, n - k), ty.slice(k, n - k), same_proc, true);
  });
}

LegalityReport check_deadlock_freedom(const Prdg& residual, const HsdSchedule& sch, std::span<const std::int64_t> s,
                                      std::size_t max_witnesses) {
  const std::size_t k = sch.k;
  return enumerate_check(residual, sch, s, max_witnesses, [k](const Point& a, const Point& b) {
    return lex_compare(std::span<const std::int64_t>(a).first(k), std::span<const std::int64_t>(b).first(k)) ==
           std::strong_ordering::less;
  });
}

LegalityReport check_deadlock_freedom_symbolic(const Prdg& residual, const HsdSchedule& sch) {
  const std::size_t k = sch.k;
  return symbolic_check(residual, sch, [k](const AffineMap& tx, const AffineMap& ty, const Polyhedron& d) {
    return lex_less_set(tx.slice(0, k), ty.slice(0, k), d, false);
  });
}

// ---------------------------------------------------------------- reindexing

std::vector<std::string> spacetime_dims(std::size_t n, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back("p" + std::to_string(i));
  for (std::size_t i = k; i < n; ++i) out.push_back("t" + std::to_string(i - k));
  return out;
}

SpaceTimePrdg reindex_to_spacetime(const Prdg& g, const HsdSchedule& sch) {
  SpaceTimePrdg st;
  st.n = sch.n;
  st.k = sch.k;
  st.graph.params = g.params;
  const auto dims = spacetime_dims(sch.n, sch.k);
  for (const auto& node : g.nodes) {
    PrdgNode out{node.name, dims, node.domain.preimage(sch.inverse_of(node.name)), node.is_input};
    st.inverse[node.name] = sch.inverse_of(node.name);
    st.graph.nodes.push_back(std::move(out));
  }
  for (const auto& e : g.edges) {
    const AffineMap& inv = sch.inverse_of(e.src);
    HyperEdge out{e.name, e.src, e.domain.preimage(inv), {}};
    for (const auto& p : e.pairs) {
      IoPair q{p.src, p.dst, out.domain, compose(sch.map_of(p.dst), compose(p.f, inv)), p.provenance};
      out.pairs.push_back(std::move(q));
    }
    st.graph.edges.push_back(std::move(out));
  }
  return st;
}

}  // namespace hsd
