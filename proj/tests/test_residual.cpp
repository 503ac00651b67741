#include "random_instances.hpp"

#include <doctest.h>

using namespace hsd;
using namespace hsd::test;

TEST_CASE("the recurrence leaves two processor-crossing edges") {
  const Prdg g = rex_tiled();
  const Prdg r = residualize(g, rex_schedule(g));
  const Names n = g.names_of("S");
  REQUIRE(r.edges.size() == 2);

  CHECK(r.edges[0].name == "e1");
  CHECK(r.edges[0].src == "S");
  CHECK(format_polyhedron(r.edges[0].domain, n) == std::vector<std::string>{"i_b >= 1", "j_b >= 1"});
  REQUIRE(r.edges[0].pairs.size() == 1);
  CHECK(r.edges[0].pairs[0].dst == "S");
  CHECK(format_map(r.edges[0].pairs[0].f, n) == std::vector<std::string>{"i_b - 1", "j_b"});
  CHECK(r.edges[0].pairs[0].provenance == "e1/0");

  CHECK(r.edges[1].name == "e2");
  CHECK(format_polyhedron(r.edges[1].domain, n) == std::vector<std::string>{"i_b >= 1", "j_b == 0"});
  REQUIRE(r.edges[1].pairs.size() == 1);
  CHECK(r.edges[1].pairs[0].dst == "S");
  CHECK(format_map(r.edges[1].pairs[0].f, n) == std::vector<std::string>{"i_b - 1", "j_b"});

  // Same answer with concrete sizes.
  ResidualOptions o;
  o.params = Point{4, 4};
  CHECK(residualize(g, rex_schedule(g), o) == r);
}

TEST_CASE("one processor per tile keeps every non-input dependence") {
  const Prdg g = rex_tiled();
  const HsdSchedule all = make_schedule(g, 2, 2, {{"S", AffineMap::identity(2, 2)}});
  const Prdg r = residualize(g, all);
  const Point s{4, 4};
  std::size_t want = 0;
  for_each_instance(g, s, true, [&](const DependenceInstance&) {
    ++want;
    return true;
  });
  std::size_t got = 0;
  for_each_instance(r, s, true, [&](const DependenceInstance&) {
    ++got;
    return true;
  });
  CHECK(got == want);
  CHECK(coverage_check(g, all, r, s).covered());
}

TEST_CASE("coverage") {
  const Prdg g = rex_tiled();
  const HsdSchedule sch = rex_schedule(g);
  const Point s{4, 4};
  const Prdg r = residualize(g, sch);
  const auto full = coverage_check(g, sch, r, s);
  CHECK(full.covered());
  CHECK(full.residual == 20);
  CHECK(full.static_ordered + full.residual == full.instances);

  Prdg missing = r;
  missing.edges.erase(missing.edges.begin() + 1);
  const auto gap = coverage_check(g, sch, missing, s, 100);
  CHECK(gap.uncovered_count == 4);
  REQUIRE(gap.uncovered.size() == 4);
  for (const auto& u : gap.uncovered) {
    CHECK(u.consumer[1] == 0);
    CHECK(u.consumer[0] > 0);
    CHECK(u.producer == Point{u.consumer[0] - 1, 0});
  }

  ResidualOptions over;
  over.keep_static = true;
  const auto o = coverage_check(g, sch, residualize(g, sch, over), s);
  CHECK(o.covered());
  CHECK(o.both == o.static_ordered);
}

TEST_CASE("residuals agree with enumeration on random instances") {
  Gen gen(99);
  for (int r = 0; r < 100; ++r) {
    const RandomInstance ri = random_instance(gen);
    const Point s{ri.n_param};
    CAPTURE(ri.text);
    const OracleResult oracle = legality_oracle(ri);
    const Prdg symbolic = residualize(ri.graph, ri.schedule);
    CHECK(residual_instances(symbolic, s) == oracle.crossing);
    ResidualOptions o;
    o.params = s;
    CHECK(residual_instances(residualize(ri.graph, ri.schedule, o), s) == oracle.crossing);
    CHECK(coverage_check(ri.graph, ri.schedule, symbolic, s).covered() == (oracle.violations == 0));
  }
}
