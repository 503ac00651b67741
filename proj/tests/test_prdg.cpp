#include "support.hpp"

#include "hsd/error.hpp"

#include <doctest.h>

#include <set>

using namespace hsd;
using namespace hsd::test;

namespace {

using TilePairs = std::set<std::pair<Point, Point>>;

Point tile_of(const Point& z, std::int64_t b) {
  Point t(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) t[i] = z[i] >= 0 ? z[i] / b : -((-z[i] + b - 1) / b);
  return t;
}

// Point-level dependences projected onto tiles, same-tile pairs dropped.
TilePairs projected(const Prdg& g, std::int64_t b, const Point& s) {
  TilePairs out;
  for_each_instance(g, s, true, [&](const DependenceInstance& d) {
    Point c = tile_of(d.consumer, b), p = tile_of(d.producer, b);
    if (c != p) out.insert({c, p});
    return true;
  });
  return out;
}

TilePairs tiled_instances(const Prdg& g, const Point& s) {
  TilePairs out;
  for_each_instance(g, s, true, [&](const DependenceInstance& d) {
    out.insert({d.consumer, d.producer});
    return true;
  });
  return out;
}

const char* kChain = R"({
  "params": ["M"],
  "nodes": [{"name": "A", "dims": ["i"], "domain": ["0 <= i <= M - 1"]}],
  "edges": [{"name": "c", "src": "A", "domain": ["i >= 1"], "deps": [{"dst": "A", "map": ["i - 1"]}]}]
})";

}  // namespace

TEST_CASE("the point-level fixture") {
  const Prdg g = load_prdg(data_path("rex.prdg.json"));
  CHECK(g.nodes.size() == 2);
  CHECK(g.nodes[0].name == "S");
  CHECK(g.nodes[1].name == "In");
  CHECK(g.nodes[1].is_input);
  REQUIRE(g.edges.size() == 4);
  CHECK(g.edges[0].name == "e1");
  CHECK(g.edges[3].name == "e4");
  CHECK(g.edges[0].pairs.size() == 2);

  const auto report = validate_prdg(g, Point{4, 4});
  CHECK(report.clean());
  // 2 deps at each of the 16 points.
  CHECK(report.instances == 32);
}

TEST_CASE("serialization round-trips") {
  for (const char* file : {"rex.prdg.json", "rex_tiled.prdg.json", "rex3d.prdg.json", "jacobi1d.prdg.json",
                           "jacobi2d.prdg.json", "ltmi.prdg.json"}) {
    const Prdg g = load_prdg(data_path(file));
    CHECK_MESSAGE(parse_prdg(serialize_prdg(g)) == g, file);
  }
}

TEST_CASE("out-of-domain targets are reported with a witness") {
  const Prdg g = parse_prdg(R"({
    "params": ["M", "N"],
    "nodes": [{"name": "S", "dims": ["i", "j"], "domain": ["1 <= i <= M", "1 <= j <= N"]}],
    "edges": [{"name": "bad", "src": "S", "domain": [], "deps": [{"dst": "S", "map": ["i + M", "j"]}]}]
  })");
  const auto report = validate_prdg(g, Point{3, 3});
  REQUIRE_FALSE(report.clean());
  const PrdgViolation& v = report.violations.front();
  CHECK(v.kind == PrdgViolation::Kind::OutOfDomain);
  CHECK(v.edge == "bad");
  CHECK(v.target == Point{v.witness[0] + 3, v.witness[1]});
}

TEST_CASE("self dependences are reported") {
  const Prdg g = parse_prdg(R"({
    "params": [],
    "nodes": [{"name": "A", "dims": ["i"], "domain": ["0 <= i <= 3"]}],
    "edges": [{"name": "loop", "src": "A", "domain": ["i == 2"], "deps": [{"dst": "A", "map": ["i"]}]}]
  })");
  const auto report = validate_prdg(g, Point{});
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == PrdgViolation::Kind::SelfDependence);
  CHECK(report.violations[0].witness == Point{2});
}

TEST_CASE("malformed files") {
  CHECK_THROWS_AS(parse_prdg("{"), ParseError);
  CHECK_THROWS_AS(parse_prdg(R"({"params": [], "edges": []})"), ParseError);
  CHECK_THROWS_AS(parse_prdg(R"({"params": [], "nodes": [], "edges": [{"name": "e", "src": "X", "domain": [], "deps": []}]})"),
                  ResolutionError);
  CHECK_THROWS_AS(parse_prdg(R"({"params": [],
    "nodes": [{"name": "A", "dims": ["i"], "domain": ["0 <= i <= 3"]}],
    "edges": [{"name": "e", "src": "A", "domain": [], "deps": [{"dst": "A", "map": ["i", "i"]}]}]})"),
                  DimensionMismatch);
  try {
    parse_prdg("{\"params\": [],\n \"nodes\": [{\"name\": \"A\", \"dims\": [\"i\"], \"domain\": [\"0 <= i <=\"]}], \"edges\": []}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(load_prdg("/nonexistent/file.json"), IoError);
}

TEST_CASE("parameter binding") {
  CHECK(bind_params({"M", "N"}, {{"N", 3}, {"M", 5}}) == Point{5, 3});
  CHECK_THROWS_AS(bind_params({"M", "N"}, {{"M", 5}}), ResolutionError);
  CHECK_THROWS_AS(bind_params({"M"}, {{"M", 5}, {"Q", 1}}), ResolutionError);
}

TEST_CASE("tiling a chain") {
  const Prdg g = parse_prdg(kChain);
  const Prdg t = tile_uniform(g, Point{4}, Point{16});
  CHECK(t.params.empty());
  CHECK(t.nodes[0].dims == std::vector<std::string>{"i_b"});
  CHECK(enumerate_points(t.nodes[0].domain, Point{}).size() == 4);
  CHECK(tiled_instances(t, Point{}) == TilePairs{{{1}, {0}}, {{2}, {1}}, {{3}, {2}}});
  CHECK(tiled_instances(t, Point{}) == projected(g, 4, Point{16}));
}

TEST_CASE("tiling the two-dimensional recurrence") {
  const Prdg g = load_prdg(data_path("rex.prdg.json"));
  for (std::int64_t size : {4, 7, 8, 9, 13}) {
    const Prdg t = tile_uniform(g, Point{4}, Point{size, size});
    CAPTURE(size);
    CHECK(tiled_instances(t, Point{}) == projected(g, 4, Point{size, size}));
    std::set<std::string> node_names;
    for (const auto& n : t.nodes) node_names.insert(n.name);
    CHECK(node_names == std::set<std::string>{"S", "In"});
  }
  // With points 0..4b-1 per dimension the tile graph matches the shipped
  // tiled fixture: every neighbour offset (-1, 0) and (0, -1).
  const Prdg fixture = rex_tiled();
  const Prdg t = tile_uniform(g, Point{4}, Point{15, 15});
  CHECK(tiled_instances(t, Point{}) == tiled_instances(fixture, Point{3, 3}));
}

TEST_CASE("tiling agrees with projection on random uniform graphs") {
  Gen gen(17);
  for (int r = 0; r < 40; ++r) {
    const std::size_t dim = static_cast<std::size_t>(gen.range(1, 3));
    const std::int64_t b = gen.range(1, 4);
    std::string dims, domain, maps;
    const char* names[] = {"x", "y", "z"};
    for (std::size_t d = 0; d < dim; ++d) {
      dims += std::string(d ? ", " : "") + "\"" + names[d] + "\"";
      domain += std::string(d ? ", " : "") + "\"" + std::to_string(gen.range(-2, 1)) + " <= " + names[d] + " <= " +
                std::to_string(gen.range(2, 7)) + "\"";
    }
    std::string deps;
    const int ndeps = static_cast<int>(gen.range(1, 3));
    for (int k = 0; k < ndeps; ++k) {
      std::string rows;
      for (std::size_t d = 0; d < dim; ++d) {
        rows += std::string(d ? ", " : "") + "\"" + names[d] + " + " + std::to_string(gen.range(-b, b)) + "\"";
      }
      deps += std::string(k ? ", " : "") + "{\"dst\": \"A\", \"map\": [" + rows + "]}";
    }
    const std::string text = "{\"params\": [], \"nodes\": [{\"name\": \"A\", \"dims\": [" + dims + "], \"domain\": [" +
                             domain + "]}], \"edges\": [{\"name\": \"e\", \"src\": \"A\", \"domain\": [], \"deps\": [" +
                             deps + "]}]}";
    const Prdg g = parse_prdg(text);
    // One edge per pair, restricted to consumers whose producer is in the domain.
    const Polyhedron& dom = g.nodes[0].domain.pieces()[0];
    Prdg split = g;
    split.edges.clear();
    for (std::size_t k = 0; k < g.edges[0].pairs.size(); ++k) {
      IoPair p = g.edges[0].pairs[k];
      p.domain = dom.preimage(p.f);
      split.edges.push_back({"e" + std::to_string(k), "A", p.domain, {p}});
    }
    CAPTURE(text);
    const Prdg t = tile_uniform(split, Point{b}, Point{});
    CHECK(tiled_instances(t, Point{}) == projected(split, b, Point{}));
  }
}

TEST_CASE("tiling rejects what it cannot handle") {
  const Prdg skew = parse_prdg(R"({"params": [],
    "nodes": [{"name": "A", "dims": ["i", "j"], "domain": ["0 <= i <= 5", "0 <= j <= 5"]}],
    "edges": [{"name": "e", "src": "A", "domain": ["i >= 1"], "deps": [{"dst": "A", "map": ["i - 1", "i"]}]}]})");
  CHECK_THROWS_AS(tile_uniform(skew, Point{2}, Point{}), NonUniformDependence);
  const Prdg far = parse_prdg(R"({"params": [],
    "nodes": [{"name": "A", "dims": ["i"], "domain": ["0 <= i <= 9"]}],
    "edges": [{"name": "e", "src": "A", "domain": ["i >= 5"], "deps": [{"dst": "A", "map": ["i - 5"]}]}]})");
  CHECK_THROWS_AS(tile_uniform(far, Point{2}, Point{}), NonUniformDependence);
  const Prdg tri = parse_prdg(R"({"params": [],
    "nodes": [{"name": "A", "dims": ["i", "j"], "domain": ["0 <= i <= 5", "0 <= j <= i"]}], "edges": []})");
  CHECK_THROWS_AS(tile_uniform(tri, Point{2}, Point{}), NonRectangularDomain);
}

TEST_CASE("shipped tiled fixtures are valid and match the kernels' dependences") {
  for (const auto& info : kernel_catalog()) {
    const Prdg g = load_prdg(data_path(info.prdg_file));
    Point s = info.desk_params;
    for (auto& v : s) v = std::max<std::int64_t>(2, v / 8);
    CAPTURE(info.id);
    CHECK(validate_prdg(g, s).clean());
    const KernelConfig cfg{s, std::max<std::int64_t>(info.min_tile, 3), "", 0};
    const auto deps = projected_tile_dependences(info.id, cfg);
    const TilePairs want(deps.begin(), deps.end());
    CHECK(tiled_instances(g, s) == want);
  }
}
