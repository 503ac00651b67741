#include "random_instances.hpp"

#include "hsd/error.hpp"

#include <doctest.h>

using namespace hsd;
using namespace hsd::test;

TEST_CASE("shipped schedules load") {
  const Prdg rex = rex_tiled();
  const HsdSchedule s = rex_schedule(rex);
  CHECK(s.n == 2);
  CHECK(s.k == 1);
  CHECK(s.map_of("S").is_identity());
  // The input node has no map in the file and gets the identity.
  CHECK(s.map_of("In").is_identity());

  const Prdg j1 = load_prdg(data_path("jacobi1d.prdg.json"));
  const HsdSchedule sj = load_schedule(data_path("jacobi1d.sched.json"), j1);
  CHECK(sj.map_of("S").apply(Point{3, 5}, Point{64, 256}) == Point{3, 11});
  CHECK(sj.inverse_of("S").apply(Point{3, 11}, Point{64, 256}) == Point{3, 5});

  for (const auto& info : kernel_catalog()) {
    const Prdg g = load_prdg(data_path(info.prdg_file));
    for (const auto& m : info.mappings) {
      const HsdSchedule sch = load_schedule(data_path(m.schedule_file), g);
      CHECK(parse_schedule(serialize_schedule(sch, g), g).theta == sch.theta);
    }
  }
}

TEST_CASE("bad schedules") {
  const Prdg rex = rex_tiled();
  CHECK_THROWS_AS(parse_schedule(R"({"n": 2, "k": 1, "maps": {"S": {"rows": ["i_b", "2*j_b"]}}})", rex), NotInvertible);
  CHECK_THROWS_AS(parse_schedule(R"({"n": 2, "k": 3, "maps": {"S": {"rows": ["i_b", "j_b"]}}})", rex), ScheduleError);
  CHECK_THROWS_AS(parse_schedule(R"({"n": 3, "k": 1, "maps": {"S": {"rows": ["i_b", "j_b"]}}})", rex), ScheduleError);
  CHECK_THROWS_AS(parse_schedule(R"({"n": 2, "k": 1, "maps": {"Q": {"rows": ["i_b", "j_b"]}}})", rex), ResolutionError);
  CHECK_THROWS_AS(parse_schedule(R"({"n": 2, "maps": {}})", rex), ParseError);
  CHECK_THROWS_AS(parse_schedule(R"({"n": 2, "k": 1, "maps": {"S": {"rows": ["i_b +", "j_b"]}}})", rex), ParseError);
}

TEST_CASE("partial legality of the recurrence") {
  const Prdg g = rex_tiled();
  const Point s{4, 4};
  const auto good = check_partial_legality(g, rex_schedule(g), s);
  CHECK(good.legal());
  CHECK(good.checked_instances > 0);
  CHECK(check_partial_legality_symbolic(g, rex_schedule(g)).legal());

  const HsdSchedule bad = load_schedule(data_path("rex_bad.sched.json"), g);
  const auto r = check_partial_legality(g, bad, s);
  CHECK(r.status == Verdict::Violations);
  // Every (i_b, j_b) with j_b > 0 breaks the j-dependence: 4 * 4 from e1, 4 from e4.
  CHECK(r.violation_count == 20);
  REQUIRE_FALSE(r.violations.empty());
  const auto& v = r.violations.front();
  CHECK(v.pi_src == v.pi_dst);
  CHECK(lex_compare(v.tau_src, v.tau_dst) != std::strong_ordering::greater);
  CHECK(check_partial_legality_symbolic(g, bad).status == Verdict::Violations);
}

TEST_CASE("deadlock freedom") {
  const Prdg g = rex_tiled();
  const HsdSchedule sch = rex_schedule(g);
  const Prdg r = residualize(g, sch);
  CHECK(check_deadlock_freedom(r, sch, Point{4, 4}).legal());
  CHECK(check_deadlock_freedom_symbolic(r, sch).legal());

  // A residual pair whose producer sits on the next processor.
  Prdg rev = r;
  rev.edges[0].pairs[0].f = parse_map({"i_b + 1", "j_b"}, g.names_of("S"));
  rev.edges[0].pairs[0].domain.add(parse_constraint("i_b < M_b", g.names_of("S")).front());
  const auto d = check_deadlock_freedom(rev, sch, Point{4, 4});
  CHECK(d.status == Verdict::Violations);
  REQUIRE_FALSE(d.violations.empty());
  CHECK(d.violations.front().pi_dst[0] == d.violations.front().pi_src[0] + 1);
  CHECK(check_deadlock_freedom_symbolic(rev, sch).status == Verdict::Violations);
}

TEST_CASE("reindexing into space-time") {
  const Prdg g = load_prdg(data_path("jacobi1d.prdg.json"));
  const HsdSchedule sch = load_schedule(data_path("jacobi1d.sched.json"), g);
  const SpaceTimePrdg st = reindex_to_spacetime(g, sch);
  CHECK(spacetime_dims(2, 1) == std::vector<std::string>{"p0", "t0"});
  // (t, s) -> (t - 1, s) becomes (p, u) -> (p - 1, u - 2); the (t, s) -> (t, s - 1)
  // neighbour becomes (p, u - 1).
  Gen gen(8);
  const Point params{6, 10};
  bool saw_time_dep = false;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    for (std::size_t q = 0; q < g.edges[e].pairs.size(); ++q) {
      const IoPair& orig = g.edges[e].pairs[q];
      const IoPair& re = st.graph.edges[e].pairs[q];
      if (g.is_input(orig.dst)) continue;
      const Point d = orig.f.apply(Point{0, 0}, params);
      if (d == Point{-1, 0}) {
        saw_time_dep = true;
        for (int r = 0; r < 100; ++r) {
          const Point pu = gen.point(2, -20, 20);
          CHECK(re.f.apply(pu, params) == Point{pu[0] - 1, pu[1] - 2});
        }
      }
      for (int r = 0; r < 20; ++r) {
        const Point z = gen.point(2, -10, 10);
        const Point theta_z = sch.map_of(orig.src).apply(z, params);
        CHECK(re.f.apply(theta_z, params) == sch.map_of(orig.dst).apply(orig.f.apply(z, params), params));
      }
    }
  }
  CHECK(saw_time_dep);
}

TEST_CASE("lex-less sets") {
  const Names n = names({"i", "j"});
  const Polyhedron box = poly({"0 <= i <= 3", "0 <= j <= 3"}, n);
  const AffineMap a = map({"i", "j"}, n);
  const AffineMap b = map({"j", "i"}, n);
  std::size_t less = 0, less_eq = 0;
  for (const auto& z : enumerate_points(box, Point{})) {
    less += z[0] < z[1] ? 1 : 0;
    less_eq += z[0] <= z[1] ? 1 : 0;
  }
  CHECK(enumerate_points(lex_less_set(a, b, box, false), Point{}).size() == less);
  CHECK(enumerate_points(lex_less_set(a, b, box, true), Point{}).size() == less_eq);
}

TEST_CASE("legality agrees with enumeration on random instances") {
  Gen gen(1234);
  for (int r = 0; r < 100; ++r) {
    const RandomInstance ri = random_instance(gen);
    const Point s{ri.n_param};
    CAPTURE(ri.text);
    const OracleResult oracle = legality_oracle(ri);
    const LegalityReport rep = check_partial_legality(ri.graph, ri.schedule, s);
    CHECK(rep.checked_instances == oracle.instances);
    CHECK(rep.violation_count == oracle.violations);
    CHECK(rep.legal() == (oracle.violations == 0));
    // Symbolic verdicts hold for all sizes, so they may not contradict this one.
    const LegalityReport sym = check_partial_legality_symbolic(ri.graph, ri.schedule);
    if (sym.status == Verdict::Legal) CHECK(oracle.violations == 0);
  }
}
