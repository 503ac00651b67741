#include "hsd/instrument.hpp"

#include "hsd/error.hpp"
#include "hsd/expr.hpp"

#include <json.hpp>

#include <algorithm>

namespace hsd {

std::size_t TileProgram::node_index(std::string_view name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return i;
  throw ResolutionError("tile program has no node '" + std::string(name) + "'", std::string(name));
}

std::size_t TileProgram::clause_count() const {
  std::size_t c = 0;
  for (const auto& node : nodes) c += node.clauses.size();
  return c;
}

TileProgram build_tile_program(const SpaceTimePrdg& program, const SpaceTimePrdg& residual) {
  if (program.n != residual.n || program.k != residual.k || program.graph.params != residual.graph.params) {
    throw ScheduleError("residual graph is not in the program's space-time coordinates");
  }
  TileProgram tp;
  tp.n = program.n;
  tp.k = program.k;
  tp.params = program.graph.params;
  tp.dims = spacetime_dims(tp.n, tp.k);
  tp.update_domain = PolyUnion(tp.n, tp.params.size());

  for (const auto& node : program.graph.nodes) {
    if (node.is_input) continue;
    if (node.dims.size() != tp.n) throw ScheduleError("node '" + node.name + "' is not in space-time coordinates");
    TileNode tn{node.name, node.domain, program.inverse.at(node.name), {}};
    for (const auto& piece : node.domain.pieces()) tp.update_domain.add(piece);
    tp.nodes.push_back(std::move(tn));
  }

  for (const auto& e : residual.graph.edges) {
    auto& node = tp.nodes[tp.node_index(e.src)];
    auto clause = std::find_if(node.clauses.begin(), node.clauses.end(),
                               [&](const AcquireClause& c) { return c.domain == e.domain; });
    if (clause == node.clauses.end()) {
      node.clauses.push_back({e.name, e.domain, {}});
      clause = std::prev(node.clauses.end());
    }
    for (const auto& pair : e.pairs) {
      if (residual.graph.is_input(pair.dst)) throw ScheduleError("residual pair into input node '" + pair.dst + "'");
      tp.node_index(pair.dst);
      clause->targets.push_back({pair.dst, residual.proc_part(pair), residual.time_part(pair), pair.provenance});
    }
  }
  return tp;
}

// ------------------------------------------------------------------ compiled

CompiledProgram::CompiledProgram(const TileProgram& tp, std::span<const std::int64_t> s) : n_(tp.n), k_(tp.k) {
  if (s.size() != tp.params.size()) throw DimensionMismatch("wrong number of parameter values");
  for (const auto& node : tp.nodes) {
    std::vector<Clause> cs;
    for (const auto& c : node.clauses) {
      Clause cc{ConcretePolyhedron(c.domain, s), {}};
      for (const auto& t : c.targets) {
        cc.targets.push_back({tp.node_index(t.node), ConcreteAffineMap(t.proc, s), ConcreteAffineMap(t.time, s)});
      }
      cs.push_back(std::move(cc));
    }
    clauses_.push_back(std::move(cs));
    to_tile_.emplace_back(node.to_tile, s);
  }
}

void CompiledProgram::obligations(std::size_t node, std::span<const std::int64_t> p, std::span<const std::int64_t> t,
                                  std::vector<Obligation>& out) const {
  if (p.size() != k_ || t.size() != n_ - k_) throw DimensionMismatch("obligations: (p, t) has the wrong shape");
  Point pt(p.begin(), p.end());
  pt.insert(pt.end(), t.begin(), t.end());
  const auto& cs = clauses_.at(node);
  for (std::size_t ci = 0; ci < cs.size(); ++ci) {
    if (!cs[ci].domain.contains(pt)) continue;
    for (std::size_t ti = 0; ti < cs[ci].targets.size(); ++ti) {
      const Target& tg = cs[ci].targets[ti];
      out.push_back({ci, ti, tg.producer, tg.proc.apply(pt), tg.time.apply(pt)});
    }
  }
}

Point CompiledProgram::tile_coords(std::size_t node, std::span<const std::int64_t> pt) const {
  return to_tile_.at(node).apply(pt);
}

std::vector<Obligation> acquire_obligations(const TileProgram& tp, std::size_t node, std::span<const std::int64_t> p,
                                            std::span<const std::int64_t> t, std::span<const std::int64_t> s) {
  std::vector<Obligation> out;
  CompiledProgram(tp, s).obligations(node, p, t, out);
  return out;
}

TileProgram drop_clause(const TileProgram& tp, const std::string& which) {
  TileProgram out = tp;
  if (auto colon = which.rfind(':'); colon != std::string::npos) {
    auto& node = out.nodes[out.node_index(which.substr(0, colon))];
    const std::size_t idx = std::stoul(which.substr(colon + 1));
    if (idx >= node.clauses.size()) throw ResolutionError("no clause " + which, which);
    node.clauses.erase(node.clauses.begin() + static_cast<std::ptrdiff_t>(idx));
    return out;
  }
  for (auto& node : out.nodes) {
    auto it = std::find_if(node.clauses.begin(), node.clauses.end(), [&](const AcquireClause& c) { return c.edge == which; });
    if (it != node.clauses.end()) {
      node.clauses.erase(it);
      return out;
    }
  }
  throw ResolutionError("no clause named '" + which + "'", which);
}

std::string serialize_tile_program(const TileProgram& tp) {
  using oj = nlohmann::ordered_json;
  const Names names{tp.dims, tp.params};
  auto union_json = [&](const PolyUnion& u) {
    oj arr = oj::array();
    for (const auto& p : u.pieces()) arr.push_back(format_polyhedron(p, names));
    return arr;
  };
  oj j;
  j["n"] = tp.n;
  j["k"] = tp.k;
  j["params"] = tp.params;
  j["dims"] = tp.dims;
  j["nodes"] = oj::array();
  for (const auto& node : tp.nodes) {
    oj jn;
    jn["name"] = node.name;
    jn["domain"] = union_json(node.domain);
    jn["to_tile"] = format_map(node.to_tile, names);
    jn["clauses"] = oj::array();
    for (const auto& c : node.clauses) {
      oj jc;
      jc["edge"] = c.edge;
      jc["domain"] = format_polyhedron(c.domain, names);
      jc["targets"] = oj::array();
      for (const auto& t : c.targets) {
        jc["targets"].push_back({{"node", t.node},
                                 {"proc", format_map(t.proc, names)},
                                 {"time", format_map(t.time, names)},
                                 {"origin", t.origin}});
      }
      jn["clauses"].push_back(std::move(jc));
    }
    j["nodes"].push_back(std::move(jn));
  }
  j["update"] = {{"domain", union_json(tp.update_domain)}};
  return j.dump(2) + "\n";
}

}  // namespace hsd
