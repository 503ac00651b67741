#include "hsd/prdg.hpp"

#include "hsd/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace hsd {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::optional<std::size_t> Prdg::find_node(std::string_view name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return i;
  return std::nullopt;
}

const PrdgNode& Prdg::node(std::string_view name) const { return nodes[node_index(name)]; }

std::size_t Prdg::node_index(std::string_view name) const {
  if (auto i = find_node(name)) return *i;
  throw ResolutionError("unknown node '" + std::string(name) + "'", std::string(name));
}

Names Prdg::names_of(std::string_view name) const { return {node(name).dims, params}; }

PolyUnion instance_domain(const Prdg& g, const IoPair& pair) {
  const PrdgNode& src = g.node(pair.src);
  PolyUnion out(src.dims.size(), g.params.size());
  for (const auto& piece : src.domain.pieces()) out.add(pair.domain.intersect(piece));
  return out;
}

// ------------------------------------------------------------------ parsing

namespace {

std::pair<int, int> line_col(std::string_view text, std::size_t offset) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  json parse() const {
    try {
      return json::parse(text_);
    } catch (const json::parse_error& e) {
      auto [line, col] = line_col(text_, e.byte > 0 ? e.byte - 1 : 0);
      std::string msg = e.what();
      if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
      throw ParseError(msg, line, col);
    }
  }

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError(path + ": " + what);
  }

  // Re-anchors an expression-level error at the expression's position in
  // the file, when the string can be found verbatim.
  [[noreturn]] void fail_in(const std::string& path, const std::string& expr, const ParseError& e) const {
    const std::string quoted = "\"" + expr + "\"";
    if (auto pos = text_.find(quoted); pos != std::string_view::npos) {
      auto [line, col] = line_col(text_, pos + 1);
      throw ParseError(path + ": " + e.what(), line, col + std::max(e.column(), 1) - 1);
    }
    throw ParseError(path + ": " + e.what());
  }

  const json& field(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing field \"" + key + "\"");
    return *it;
  }

  std::string string_at(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<std::string> strings_at(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(string_at(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  Polyhedron polyhedron_at(const json& v, const Names& names, const std::string& path) const {
    Polyhedron p(names.dims.size(), names.params.size());
    const auto rows = strings_at(v, path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      try {
        for (auto& row : parse_constraint(rows[i], names)) p.add(std::move(row));
      } catch (const ResolutionError&) {
        throw;
      } catch (const ParseError& e) {
        fail_in(path + "[" + std::to_string(i) + "]", rows[i], e);
      }
    }
    return p;
  }

  PolyUnion union_at(const json& v, const Names& names, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array");
    const bool is_union = !v.empty() && v[0].is_array();
    if (!is_union) return PolyUnion(polyhedron_at(v, names, path));
    PolyUnion u(names.dims.size(), names.params.size());
    for (std::size_t i = 0; i < v.size(); ++i) u.add(polyhedron_at(v[i], names, path + "[" + std::to_string(i) + "]"));
    return u;
  }

  AffineMap map_at(const json& v, const Names& names, const std::string& path) const {
    const auto rows = strings_at(v, path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      try {
        parse_affine(rows[i], names);
      } catch (const ResolutionError&) {
        throw;
      } catch (const ParseError& e) {
        fail_in(path + "[" + std::to_string(i) + "]", rows[i], e);
      }
    }
    return parse_map(rows, names);
  }

 private:
  std::string_view text_;
};

}  // namespace

Prdg parse_prdg(std::string_view text) {
  Reader rd(text);
  const json j = rd.parse();
  if (!j.is_object()) rd.fail("<root>", "expected an object");

  Prdg g;
  if (j.contains("params")) g.params = rd.strings_at(j["params"], "params");

  const json& nodes = rd.field(j, "nodes", "<root>");
  if (!nodes.is_array()) rd.fail("nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    PrdgNode node;
    node.name = rd.string_at(rd.field(nodes[i], "name", path), path + ".name");
    if (g.find_node(node.name)) rd.fail(path, "duplicate node name '" + node.name + "'");
    node.dims = rd.strings_at(rd.field(nodes[i], "dims", path), path + ".dims");
    node.domain = rd.union_at(rd.field(nodes[i], "domain", path), {node.dims, g.params}, path + ".domain");
    if (nodes[i].contains("input")) {
      if (!nodes[i]["input"].is_boolean()) rd.fail(path + ".input", "expected a boolean");
      node.is_input = nodes[i]["input"].get<bool>();
    }
    g.nodes.push_back(std::move(node));
  }

  if (j.contains("edges")) {
    const json& edges = j["edges"];
    if (!edges.is_array()) rd.fail("edges", "expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string path = "edges[" + std::to_string(i) + "]";
      HyperEdge e;
      e.name = edges[i].contains("name") ? rd.string_at(edges[i]["name"], path + ".name") : "e" + std::to_string(i + 1);
      e.src = rd.string_at(rd.field(edges[i], "src", path), path + ".src");
      const PrdgNode& src = g.node(e.src);
      if (src.is_input) rd.fail(path, "input node '" + e.src + "' cannot be the source of an edge");
      const Names names = g.names_of(e.src);
      e.domain = rd.polyhedron_at(rd.field(edges[i], "domain", path), names, path + ".domain");
      const json& deps = rd.field(edges[i], "deps", path);
      if (!deps.is_array() || deps.empty()) rd.fail(path + ".deps", "expected a nonempty array");
      for (std::size_t d = 0; d < deps.size(); ++d) {
        const std::string dpath = path + ".deps[" + std::to_string(d) + "]";
        IoPair pair;
        pair.src = e.src;
        pair.dst = rd.string_at(rd.field(deps[d], "dst", dpath), dpath + ".dst");
        const PrdgNode& dst = g.node(pair.dst);
        pair.domain = e.domain;
        pair.f = rd.map_at(rd.field(deps[d], "map", dpath), names, dpath + ".map");
        if (pair.f.out_dim() != dst.dims.size()) {
          throw DimensionMismatch(dpath + ".map: " + std::to_string(pair.f.out_dim()) + " rows but node '" + dst.name +
                                  "' has " + std::to_string(dst.dims.size()) + " dims");
        }
        if (deps[d].contains("provenance")) pair.provenance = rd.string_at(deps[d]["provenance"], dpath + ".provenance");
        e.pairs.push_back(std::move(pair));
      }
      auto same = std::find_if(g.edges.begin(), g.edges.end(),
                               [&](const HyperEdge& o) { return o.src == e.src && o.domain == e.domain; });
      if (same != g.edges.end()) {
        same->pairs.insert(same->pairs.end(), e.pairs.begin(), e.pairs.end());
      } else {
        g.edges.push_back(std::move(e));
      }
    }
  }
  return g;
}

Prdg load_prdg(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_prdg(ss.str());
}

std::string serialize_prdg(const Prdg& g) {
  ordered_json j;
  j["params"] = g.params;
  j["nodes"] = ordered_json::array();
  for (const auto& n : g.nodes) {
    ordered_json jn;
    jn["name"] = n.name;
    jn["dims"] = n.dims;
    const Names names{n.dims, g.params};
    if (n.domain.pieces().size() == 1) {
      jn["domain"] = format_polyhedron(n.domain.pieces()[0], names);
    } else {
      jn["domain"] = ordered_json::array();
      for (const auto& p : n.domain.pieces()) jn["domain"].push_back(format_polyhedron(p, names));
    }
    if (n.is_input) jn["input"] = true;
    j["nodes"].push_back(std::move(jn));
  }
  j["edges"] = ordered_json::array();
  for (const auto& e : g.edges) {
    const Names names = g.names_of(e.src);
    ordered_json je;
    je["name"] = e.name;
    je["src"] = e.src;
    je["domain"] = format_polyhedron(e.domain, names);
    je["deps"] = ordered_json::array();
    for (const auto& p : e.pairs) {
      ordered_json jp;
      jp["dst"] = p.dst;
      jp["map"] = format_map(p.f, names);
      if (!p.provenance.empty()) jp["provenance"] = p.provenance;
      je["deps"].push_back(std::move(jp));
    }
    j["edges"].push_back(std::move(je));
  }
  return j.dump(2) + "\n";
}

Point bind_params(const std::vector<std::string>& names, const std::map<std::string, std::int64_t>& values) {
  for (const auto& [k, v] : values) {
    if (std::find(names.begin(), names.end(), k) == names.end()) {
      throw ResolutionError("unknown parameter '" + k + "'", k);
    }
  }
  Point s;
  for (const auto& n : names) {
    auto it = values.find(n);
    if (it == values.end()) throw ResolutionError("no value given for parameter '" + n + "'", n);
    s.push_back(it->second);
  }
  return s;
}

// --------------------------------------------------------------- validation

void for_each_instance(const Prdg& g, std::span<const std::int64_t> s, bool skip_input,
                       const std::function<bool(const DependenceInstance&)>& visit) {
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    for (std::size_t pi = 0; pi < e.pairs.size(); ++pi) {
      const auto& pair = e.pairs[pi];
      if (skip_input && g.is_input(pair.dst)) continue;
      const ConcreteAffineMap f(pair.f, s);
      for (const auto& z : enumerate_points(instance_domain(g, pair), s)) {
        if (!visit({ei, pi, z, f.apply(z)})) return;
      }
    }
  }
}

ValidationReport validate_prdg(const Prdg& g, std::span<const std::int64_t> s, std::size_t max_witnesses) {
  if (s.size() != g.params.size()) throw DimensionMismatch("validate: wrong number of parameter values");
  ValidationReport report;
  std::size_t recorded = 0;
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    std::size_t edge_instances = 0;
    for (std::size_t pi = 0; pi < e.pairs.size(); ++pi) {
      const auto& pair = e.pairs[pi];
      const PrdgNode& dst = g.node(pair.dst);
      const ConcreteAffineMap f(pair.f, s);
      std::vector<ConcretePolyhedron> dst_pieces;
      for (const auto& piece : dst.domain.pieces()) dst_pieces.emplace_back(piece, s);
      recorded = 0;
      for (const auto& z : enumerate_points(instance_domain(g, pair), s)) {
        ++edge_instances;
        ++report.instances;
        const Point y = f.apply(z);
        const bool inside = std::any_of(dst_pieces.begin(), dst_pieces.end(), [&](const auto& p) { return p.contains(y); });
        auto record = [&](PrdgViolation::Kind kind, const std::string& msg) {
          if (recorded++ < max_witnesses) report.violations.push_back({kind, e.name, pi, z, y, msg});
        };
        if (!inside) {
          record(PrdgViolation::Kind::OutOfDomain, "edge " + e.name + ": " + pair.src + to_string(z) + " -> " + pair.dst +
                                                       to_string(y) + " lies outside dom(" + pair.dst + ")");
        }
        if (pair.src == pair.dst && y == z) {
          record(PrdgViolation::Kind::SelfDependence,
                 "edge " + e.name + ": " + pair.src + to_string(z) + " depends on itself");
        }
      }
    }
    if (edge_instances == 0) report.warnings.push_back("edge " + e.name + " has an empty domain at these sizes");
  }
  return report;
}

// ------------------------------------------------------------------- tiling

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct Interval {
  std::int64_t lo;
  std::int64_t hi;
  bool empty() const { return lo > hi; }
};

// Per-dimension bounds of a box-shaped polyhedron at concrete parameters;
// nullopt when a constant row is violated.
std::optional<std::vector<Interval>> box_bounds(const Polyhedron& p, std::span<const std::int64_t> s,
                                                const std::string& what) {
  const std::size_t n = p.dim();
  std::vector<std::optional<std::int64_t>> lo(n), hi(n);
  for (const auto& row : p.constraints()) {
    Int c = row.c;
    for (std::size_t j = 0; j < s.size(); ++j) c += row.b[j] * s[j];
    std::optional<std::size_t> var;
    for (std::size_t j = 0; j < n; ++j) {
      if (row.a[j] == 0) continue;
      if (var) throw NonRectangularDomain(what + " is not a box: a constraint couples two dimensions");
      var = j;
    }
    const bool eq = row.kind == ConstraintKind::Equality;
    if (!var) {
      if (eq ? c != 0 : c < 0) return std::nullopt;
      continue;
    }
    const std::int64_t a = to_i64(row.a[*var]);
    const std::int64_t cc = to_i64(c);
    auto tighten_lo = [&](std::int64_t v) { lo[*var] = lo[*var] ? std::max(*lo[*var], v) : v; };
    auto tighten_hi = [&](std::int64_t v) { hi[*var] = hi[*var] ? std::min(*hi[*var], v) : v; };
    if (eq) {
      if (cc % a != 0) return std::nullopt;
      tighten_lo(-cc / a);
      tighten_hi(-cc / a);
    } else if (a > 0) {
      tighten_lo(-floor_div(cc, a));  // a·z + c >= 0  =>  z >= ceil(-c / a)
    } else {
      tighten_hi(floor_div(cc, -a));
    }
  }
  std::vector<Interval> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!lo[j] || !hi[j]) throw UnboundedDomain(what + ": dimension " + std::to_string(j) + " is unbounded");
    out[j] = {*lo[j], *hi[j]};
    if (out[j].empty()) return std::nullopt;
  }
  return out;
}

Polyhedron box_polyhedron(const std::vector<Interval>& box) {
  const std::size_t n = box.size();
  Polyhedron p(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    IntVec a(n);
    a[j] = 1;
    if (box[j].lo == box[j].hi) {
      p.add({a, {}, -Int(box[j].lo), ConstraintKind::Equality});
      continue;
    }
    p.add({a, {}, -Int(box[j].lo), ConstraintKind::Inequality});
    a[j] = -1;
    p.add({a, {}, Int(box[j].hi), ConstraintKind::Inequality});
  }
  return p;
}

// One choice for one output coordinate of a tiled pair.
struct DimOption {
  Interval tiles;       // consumer tile indices where the choice occurs
  bool constant;        // producer coordinate is a fixed tile index
  std::int64_t value;   // tile offset, or the fixed tile index
};

}  // namespace

Prdg tile_uniform(const Prdg& g, std::span<const std::int64_t> tile_sizes, std::span<const std::int64_t> s) {
  if (s.size() != g.params.size()) throw DimensionMismatch("tile_uniform: wrong number of parameter values");
  if (tile_sizes.empty()) throw DimensionMismatch("tile_uniform: no tile sizes given");
  for (auto b : tile_sizes)
    if (b <= 0) throw Error("tile sizes must be positive");
  auto size_of = [&](std::size_t dim) -> std::int64_t {
    if (tile_sizes.size() == 1) return tile_sizes[0];
    if (dim >= tile_sizes.size()) throw DimensionMismatch("tile_uniform: no tile size for dimension " + std::to_string(dim));
    return tile_sizes[dim];
  };

  Prdg out;
  for (const auto& node : g.nodes) {
    PrdgNode tn;
    tn.name = node.name;
    tn.is_input = node.is_input;
    for (const auto& d : node.dims) tn.dims.push_back(d + "_b");
    tn.domain = PolyUnion(node.dims.size(), 0);
    for (const auto& piece : node.domain.pieces()) {
      auto box = box_bounds(piece, s, "domain of " + node.name);
      if (!box) continue;
      for (std::size_t j = 0; j < box->size(); ++j) {
        (*box)[j] = {floor_div((*box)[j].lo, size_of(j)), floor_div((*box)[j].hi, size_of(j))};
      }
      Polyhedron tiled = box_polyhedron(*box);
      if (std::find(tn.domain.pieces().begin(), tn.domain.pieces().end(), tiled) == tn.domain.pieces().end()) {
        tn.domain.add(std::move(tiled));
      }
    }
    out.nodes.push_back(std::move(tn));
  }

  std::map<std::string, std::size_t> counter;
  for (const auto& e : g.edges) {
    for (const auto& pair : e.pairs) {
      const bool to_input = g.is_input(pair.dst);
      const std::size_t n = pair.f.in_dim();
      if (pair.f.out_dim() != n) throw NonUniformDependence("edge " + e.name + ": source and target dimensions differ");
      // Classify each output row as z_o + d_o or a constant.
      std::vector<bool> is_const(n);
      std::vector<std::int64_t> shift(n);
      for (std::size_t o = 0; o < n; ++o) {
        Int c = pair.f.offset()[o];
        for (std::size_t j = 0; j < s.size(); ++j) c += pair.f.param()(o, j) * s[j];
        shift[o] = to_i64(c);
        bool unit = true;
        bool zero = true;
        for (std::size_t j = 0; j < n; ++j) {
          const Int& a = pair.f.linear()(o, j);
          if (a != 0) zero = false;
          if (a != (j == o ? 1 : 0)) unit = false;
        }
        if (unit) {
          if (shift[o] > size_of(o) || -shift[o] > size_of(o)) {
            throw NonUniformDependence("edge " + e.name + ": offset exceeds the tile size in dimension " + std::to_string(o));
          }
        } else if (zero && to_input) {
          is_const[o] = true;
        } else {
          throw NonUniformDependence("edge " + e.name + ": dependence is not a uniform translation");
        }
      }

      for (const auto& piece : g.node(pair.src).domain.pieces()) {
        auto box = box_bounds(pair.domain.intersect(piece), s, "edge " + e.name);
        if (!box) continue;
        std::vector<std::vector<DimOption>> options(n);
        for (std::size_t o = 0; o < n; ++o) {
          const std::int64_t b = size_of(o);
          const Interval pts = (*box)[o];
          const Interval all{floor_div(pts.lo, b), floor_div(pts.hi, b)};
          if (is_const[o]) {
            options[o].push_back({all, true, floor_div(shift[o], b)});
            continue;
          }
          const std::int64_t d = shift[o];
          std::vector<std::int64_t> deltas{0};
          if (d != 0) deltas.push_back(d < 0 ? -1 : 1);
          for (std::int64_t delta : deltas) {
            Interval hit{1, 0};
            for (std::int64_t t = all.lo; t <= all.hi; ++t) {
              const std::int64_t lo = std::max({pts.lo, t * b, (t + delta) * b - d});
              const std::int64_t hi = std::min({pts.hi, t * b + b - 1, (t + delta) * b + b - 1 - d});
              if (lo > hi) continue;
              if (hit.empty()) hit.lo = t;
              hit.hi = t;
            }
            if (!hit.empty()) options[o].push_back({hit, false, delta});
          }
        }
        // Cartesian product of the per-dimension choices.
        std::vector<std::size_t> pick(n, 0);
        bool any = std::all_of(options.begin(), options.end(), [](const auto& v) { return !v.empty(); });
        while (any) {
          std::vector<Interval> dom(n);
          bool intra = pair.dst == pair.src;
          IntMatrix a(n, n);
          IntVec c(n);
          for (std::size_t o = 0; o < n; ++o) {
            const DimOption& opt = options[o][pick[o]];
            dom[o] = opt.tiles;
            if (opt.constant) {
              c[o] = opt.value;
              intra = false;
            } else {
              a(o, o) = 1;
              c[o] = opt.value;
              if (opt.value != 0) intra = false;
            }
          }
          if (!intra) {
            IoPair tp{pair.src, pair.dst, box_polyhedron(dom), AffineMap(std::move(a), IntMatrix(n, 0), std::move(c)), ""};
            auto edge = std::find_if(out.edges.begin(), out.edges.end(),
                                     [&](const HyperEdge& h) { return h.src == tp.src && h.domain == tp.domain; });
            if (edge == out.edges.end()) {
              out.edges.push_back({e.name + "_" + std::to_string(++counter[e.name]), tp.src, tp.domain, {}});
              edge = std::prev(out.edges.end());
            }
            if (std::find(edge->pairs.begin(), edge->pairs.end(), tp) == edge->pairs.end()) edge->pairs.push_back(tp);
          }
          std::size_t o = 0;
          while (o < n && ++pick[o] == options[o].size()) pick[o++] = 0;
          if (o == n) break;
        }
      }
    }
  }
  return out;
}

}  // namespace hsd
