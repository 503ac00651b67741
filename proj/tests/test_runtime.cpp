#include "support.hpp"

#include "hsd/error.hpp"
#include "hsd/runtime.hpp"

#include <doctest.h>

#include <thread>

using namespace hsd;
using namespace hsd::test;

namespace {

struct Rex {
  Pipeline pipeline;
  Point s;
  ExecutionPlan plan;
  KernelConfig cfg;

  explicit Rex(std::int64_t size)
      : pipeline(compile_pipeline(rex_tiled(), rex_schedule(rex_tiled()))),
        s{size, size},
        plan(make_plan(pipeline.graph, pipeline.program, s)),
        cfg{s, 4, "sum", 3} {}
};

RunOptions quick(std::size_t workers) {
  RunOptions o;
  o.workers = workers;
  o.timeout = std::chrono::milliseconds(20000);
  return o;
}

// Every tile of the recurrence waits for the next processor instead of
// the previous one.
TileProgram reversed(const TileProgram& tp) {
  TileProgram out = tp;
  const Names n{tp.dims, tp.params};
  AcquireClause c;
  c.edge = "rev";
  c.domain = poly({"p0 <= M_b - 1"}, n);
  c.targets.push_back({"S", parse_map({"p0 + 1"}, n), parse_map({"t0"}, n), "rev/0"});
  out.nodes[0].clauses = {c};
  return out;
}

}  // namespace

TEST_CASE("self-scheduled run matches the sequential order") {
  Rex rex(4);
  auto k0 = make_kernel("rex2d", rex.cfg);
  const RunResult seq = run_sequential(rex.plan.graph, *k0);
  REQUIRE(seq.status == RunStatus::Completed);
  CHECK(seq.output == reference_eval("rex2d", rex.cfg));
  CHECK(seq.metrics.tasks_spawned == 1);

  auto k1 = make_kernel("rex2d", rex.cfg);
  const RunResult one = run_hsd(rex.plan, *k1, quick(1));
  REQUIRE(one.status == RunStatus::Completed);
  CHECK(one.output == seq.output);
  CHECK(one.metrics.tasks_spawned == 5);
  CHECK(one.metrics.tiles_executed == 25);
  CHECK(one.metrics.state_entries == 5);
  CHECK(one.metrics.checks_executed == 20);
  CHECK(verify_trace(one.trace, rex.pipeline.graph, rex.s).clean());
}

TEST_CASE("eight workers give identical results") {
  Rex rex(4);
  auto k0 = make_kernel("rex2d", rex.cfg);
  const KernelOutput want = run_sequential(rex.plan.graph, *k0).output;
  for (int r = 0; r < 20; ++r) {
    auto k = make_kernel("rex2d", rex.cfg);
    RunOptions o = quick(8);
    o.seed = static_cast<std::uint64_t>(r);
    o.jitter_us = r % 2 ? 50 : 0;
    const RunResult res = run_hsd(rex.plan, *k, o);
    REQUIRE(res.status == RunStatus::Completed);
    CHECK(res.output == want);
    CHECK(res.metrics.tasks_spawned == 5);
    const TraceReport tr = verify_trace(res.trace, rex.pipeline.graph, rex.s);
    CHECK(tr.clean());
  }
}

TEST_CASE("all benchmarks run to the reference result") {
  for (const auto& info : kernel_catalog()) {
    Point s = info.desk_params;
    for (auto& v : s) v = std::max<std::int64_t>(2, v / 8);
    const KernelConfig cfg{s, std::max<std::int64_t>(info.min_tile, 3), "", 11};
    const KernelOutput want = reference_eval(info.id, cfg);
    for (const auto& m : info.mappings) {
      CAPTURE(info.id);
      CAPTURE(m.id);
      const Pipeline p = load_benchmark(info.id, m.id);
      const ExecutionPlan plan = make_plan(p.graph, p.program, s);
      CHECK(audit_plan(plan).complete());
      for (std::size_t w : {1u, 3u, 4u}) {
        auto k = make_kernel(info.id, cfg);
        const RunResult r = run_hsd(plan, *k, quick(w));
        REQUIRE(r.status == RunStatus::Completed);
        CHECK(r.output == want);
        CHECK(verify_trace(r.trace, p.graph, s).clean());
      }
      auto kw = make_kernel(info.id, cfg);
      const RunResult wf = run_wavefront(plan.graph, *kw, quick(3));
      REQUIRE(wf.status == RunStatus::Completed);
      CHECK(wf.output == want);
      CHECK(verify_trace(wf.trace, p.graph, s).clean());
    }
  }
}

TEST_CASE("a producer on a later processor times out with a diagnostic") {
  Rex rex(4);
  const TileProgram bad = reversed(rex.pipeline.program);
  const ExecutionPlan plan = make_plan(rex.pipeline.graph, bad, rex.s);
  auto k = make_kernel("rex2d", rex.cfg);
  RunOptions o = quick(1);
  o.timeout = std::chrono::milliseconds(300);
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_hsd(plan, *k, o);
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(10));
  REQUIRE(r.status == RunStatus::Timeout);
  CHECK(r.diagnostic.find("S at p=(0) t=(0) waits for S at p=(1) to reach t=(0)") != std::string::npos);
  CHECK(r.diagnostic.find("BOTTOM") != std::string::npos);
  CHECK(r.metrics.tiles_executed == 0);
}

TEST_CASE("a dropped clause is caught by the plan audit") {
  Rex rex(4);
  const ExecutionPlan plan = make_plan(rex.pipeline.graph, drop_clause(rex.pipeline.program, "e1"), rex.s);
  const AuditReport a = audit_plan(plan);
  CHECK_FALSE(a.complete());
  CHECK(a.missing_count == 16);
  CHECK(audit_plan(rex.plan).complete());
}

TEST_CASE("over-approximated obligations do not change results") {
  Rex rex(4);
  const TileProgram over = overapproximated_program(rex.pipeline);
  CHECK(over.clause_count() > rex.pipeline.program.clause_count());
  const ExecutionPlan plan = make_plan(rex.pipeline.graph, over, rex.s);
  auto k0 = make_kernel("rex2d", rex.cfg);
  const RunResult base = run_hsd(rex.plan, *k0, quick(4));
  auto k1 = make_kernel("rex2d", rex.cfg);
  const RunResult r = run_hsd(plan, *k1, quick(4));
  REQUIRE(r.status == RunStatus::Completed);
  CHECK(r.output == base.output);
  CHECK(r.metrics.obligations > base.metrics.obligations);
  CHECK(verify_trace(r.trace, rex.pipeline.graph, rex.s).clean());
}

TEST_CASE("state table") {
  using namespace std::chrono_literals;
  const auto far = std::chrono::steady_clock::now() + 10s;

  SUBCASE("satisfied requirement returns at once") {
    StateTable t(2);
    t.publish(1, 1);
    const auto r = t.wait_until(1, 1, far);
    CHECK(r.satisfied);
    CHECK(r.spins == 0);
    CHECK_FALSE(r.blocked);
    CHECK(t.wait_until(0, 0, far).satisfied);
  }

  SUBCASE("a waiter sleeps after the spin limit and wakes on publish") {
    StateTable t(2, 2);
    StateTable::WaitResult r;
    std::thread waiter([&] { r = t.wait_until(1, 1, far); });
    std::this_thread::sleep_for(30ms);
    t.publish(1, 1);
    waiter.join();
    CHECK(r.satisfied);
    CHECK(r.spins == 2);
    CHECK(r.blocked);
  }

  SUBCASE("deadline") {
    StateTable t(1, 2);
    const auto r = t.wait_until(0, 1, std::chrono::steady_clock::now() + 20ms);
    CHECK_FALSE(r.satisfied);
    CHECK(r.blocked);
  }

  SUBCASE("abort releases waiters") {
    StateTable t(1);
    StateTable::WaitResult r;
    std::thread waiter([&] { r = t.wait_until(0, 5, far); });
    std::this_thread::sleep_for(20ms);
    t.abort();
    waiter.join();
    CHECK_FALSE(r.satisfied);
    CHECK(t.aborted());
  }

  SUBCASE("entries only grow") {
    StateTable t(1);
    t.publish(0, 2);
    CHECK_THROWS_AS(t.publish(0, 2), Error);
    CHECK_THROWS_AS(t.publish(0, 1), Error);
    CHECK(t.value(0) == 2);
  }

  SUBCASE("many handshakes") {
    StateTable t(2, 2);
    std::thread producer([&] {
      for (std::int64_t c = 1; c <= 500; ++c) {
        CHECK(t.wait_until(1, c - 1, far).satisfied);
        t.publish(0, c);
      }
    });
    for (std::int64_t c = 1; c <= 500; ++c) {
      REQUIRE(t.wait_until(0, c, far).satisfied);
      t.publish(1, c);
    }
    producer.join();
    CHECK(t.value(0) == 500);
  }
}

TEST_CASE("wavefront barriers") {
  Rex rex(4);
  auto k = make_kernel("rex2d", rex.cfg);
  const RunResult r = run_wavefront(rex.plan.graph, *k, quick(4));
  CHECK(r.metrics.barriers == 9);
  CHECK(r.metrics.tasks_spawned == 25);

  Rex tiny(0);
  auto k1 = make_kernel("rex2d", tiny.cfg);
  CHECK(run_wavefront(tiny.plan.graph, *k1, quick(2)).metrics.barriers == 1);

  auto k2 = make_kernel("rex2d", rex.cfg);
  CHECK_THROWS_AS(run_wavefront(rex.plan.graph, *k2, quick(2), [](const TileRef& t) { return t.coords[0]; }),
                  ScheduleError);
  CHECK_THROWS_AS(run_wavefront(rex.plan.graph, *k2, RunOptions{0}), Error);
}

TEST_CASE("dependence cycles are reported") {
  const Prdg g = parse_prdg(R"({"params": [],
    "nodes": [{"name": "A", "dims": ["i"], "domain": ["0 <= i <= 2"]}],
    "edges": [{"name": "f", "src": "A", "domain": ["i <= 1"], "deps": [{"dst": "A", "map": ["i + 1"]}]},
              {"name": "b", "src": "A", "domain": ["i == 2"], "deps": [{"dst": "A", "map": ["i - 2"]}]}]})");
  const TileGraph tg = build_tile_graph(g, Point{});
  auto k = make_hash_kernel(g, Point{});
  try {
    run_sequential(tg, *k);
    FAIL("expected ScheduleError");
  } catch (const ScheduleError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("tile dependence cycle") != std::string::npos);
    CHECK(msg.find("A(0)") != std::string::npos);
    CHECK(msg.find("A(2)") != std::string::npos);
  }
}

TEST_CASE("metrics rows") {
  RunMetrics m;
  m.mode = "hsd";
  m.workers = 2;
  CHECK(RunMetrics::csv_header().substr(0, 13) == "mode,workers,");
  CHECK(m.csv_row().substr(0, 6) == "hsd,2,");
}
