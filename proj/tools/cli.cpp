#include "cli.hpp"

#include "hsd/codegen.hpp"
#include "hsd/error.hpp"
#include "hsd/metrics.hpp"
#include "hsd/pipeline.hpp"
#include "hsd/runtime.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace hsd::cli {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Source {
  std::string benchmark;
  std::string mapping = "m1";
  std::string prdg;
  std::string schedule;
  std::vector<std::string> params;

  void add_to(CLI::App* app) {
    app->add_option("--benchmark", benchmark, "Shipped benchmark id");
    app->add_option("--mapping", mapping, "Benchmark mapping id")->capture_default_str();
    app->add_option("--prdg", prdg, "Tiled PRDG file");
    app->add_option("--schedule", schedule, "Schedule file");
    app->add_option("--param", params, "Parameter binding NAME=VALUE (repeatable)");
  }
};

struct Loaded {
  Prdg graph;
  HsdSchedule schedule;
  Point params;
  const BenchmarkInfo* info = nullptr;
};

std::map<std::string, std::int64_t> parse_bindings(const std::vector<std::string>& items) {
  std::map<std::string, std::int64_t> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects NAME=VALUE, got '" + item + "'");
    try {
      std::size_t used = 0;
      const std::int64_t v = std::stoll(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
      out[item.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw UsageError("--param " + item + ": value is not an integer");
    }
  }
  return out;
}

Loaded load(const Source& src, bool need_schedule = true, bool need_params = true) {
  Loaded l;
  std::string sched = src.schedule;
  if (!src.benchmark.empty()) {
    l.info = &find_benchmark(src.benchmark);
    l.graph = load_prdg(data_path(l.info->prdg_file));
    if (sched.empty()) sched = data_path(find_mapping(*l.info, src.mapping).schedule_file);
  } else if (!src.prdg.empty()) {
    l.graph = load_prdg(src.prdg);
  } else {
    throw UsageError("either --benchmark or --prdg is required");
  }
  if (need_schedule) {
    if (sched.empty()) throw UsageError("--schedule is required with --prdg");
    l.schedule = load_schedule(sched, l.graph);
  }
  if (l.info && src.params.empty()) {
    l.params = l.info->desk_params;
  } else if (need_params || !src.params.empty()) {
    l.params = bind_params(l.graph.params, parse_bindings(src.params));
  }
  return l;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("cannot write '" + path + "'");
}

std::vector<std::size_t> parse_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoul(item));
    } catch (const std::logic_error&) {
      throw UsageError(std::string(what) + ": bad list '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

Point parse_point(const std::string& text) {
  Point p;
  for (auto v : parse_list(text, "--size")) p.push_back(static_cast<std::int64_t>(v));
  return p;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Legal: return "legal";
    case Verdict::Violations: return "violations";
    case Verdict::Unproven: return "unproven";
  }
  return "?";
}

ojson legality_json(const LegalityReport& r) {
  ojson j;
  j["status"] = verdict_name(r.status);
  j["checked_instances"] = r.checked_instances;
  j["violation_count"] = r.violation_count;
  j["violations"] = ojson::array();
  for (const auto& v : r.violations) {
    j["violations"].push_back({{"edge", v.edge},
                               {"pair", v.pair},
                               {"dst", v.dst},
                               {"witness", v.witness},
                               {"params", v.params},
                               {"pi_src", v.pi_src},
                               {"pi_dst", v.pi_dst},
                               {"tau_src", v.tau_src},
                               {"tau_dst", v.tau_dst}});
  }
  j["unproven"] = r.unproven;
  return j;
}

std::string describe(const ScheduleViolation& v) {
  return "edge " + v.edge + " pair " + std::to_string(v.pair) + " (to " + v.dst + ") at " + to_string(v.witness) +
         ": pi " + to_string(v.pi_src) + " vs " + to_string(v.pi_dst) + ", tau " + to_string(v.tau_src) + " vs " +
         to_string(v.tau_dst);
}

// ------------------------------------------------------------------ validate

int cmd_validate(const Source& src, const std::string& report_path, bool json_out, std::ostream& out) {
  const Loaded l = load(src);
  const auto vr = validate_prdg(l.graph, l.params);
  const auto legal = check_partial_legality(l.graph, l.schedule, l.params);
  const auto legal_sym = check_partial_legality_symbolic(l.graph, l.schedule);
  const Prdg residual = residualize(l.graph, l.schedule);
  const auto dl = check_deadlock_freedom(residual, l.schedule, l.params);
  const auto dl_sym = check_deadlock_freedom_symbolic(residual, l.schedule);
  const auto cov = coverage_check(l.graph, l.schedule, residual, l.params);

  const bool ok = vr.clean() && legal.legal() && dl.legal() && cov.covered() &&
                  legal_sym.status != Verdict::Violations && dl_sym.status != Verdict::Violations;

  ojson j;
  j["params"] = l.params;
  j["prdg"] = {{"clean", vr.clean()}, {"instances", vr.instances}, {"warnings", vr.warnings}, {"violations", ojson::array()}};
  for (const auto& v : vr.violations) {
    j["prdg"]["violations"].push_back({{"edge", v.edge}, {"pair", v.pair}, {"witness", v.witness}, {"target", v.target},
                                       {"message", v.message}});
  }
  j["partial_legality"] = legality_json(legal);
  j["partial_legality_symbolic"] = legality_json(legal_sym);
  j["residual_edges"] = residual.edges.size();
  std::size_t pairs = 0;
  for (const auto& e : residual.edges) pairs += e.pairs.size();
  j["residual_pairs"] = pairs;
  j["deadlock_freedom"] = legality_json(dl);
  j["deadlock_freedom_symbolic"] = legality_json(dl_sym);
  j["coverage"] = {{"instances", cov.instances},
                   {"static_ordered", cov.static_ordered},
                   {"residual", cov.residual},
                   {"uncovered", cov.uncovered_count}};
  j["ok"] = ok;
  const std::string report = j.dump(2) + "\n";
  if (!report_path.empty()) write_file(report_path, report);

  if (json_out) {
    out << report;
  } else if (ok) {
    out << "legal, deadlock-free, " << residual.edges.size() << " residual edge" << (residual.edges.size() == 1 ? "" : "s")
        << "\n";
    for (const auto& u : legal_sym.unproven) out << "note: partial legality unproven symbolically for " << u << "\n";
    for (const auto& u : dl_sym.unproven) out << "note: deadlock freedom unproven symbolically for " << u << "\n";
  } else {
    for (const auto& v : vr.violations) out << "prdg: " << v.message << "\n";
    for (const auto& v : legal.violations) out << "not partially legal: " << describe(v) << "\n";
    if (legal.violations.empty() && legal_sym.status == Verdict::Violations) {
      for (const auto& v : legal_sym.violations) out << "not partially legal: " << describe(v) << "\n";
    }
    for (const auto& v : dl.violations) out << "deadlock possible: " << describe(v) << "\n";
    if (dl.violations.empty() && dl_sym.status == Verdict::Violations) {
      for (const auto& v : dl_sym.violations) out << "deadlock possible: " << describe(v) << "\n";
    }
    if (!cov.covered()) out << "residual misses " << cov.uncovered_count << " dependence instances\n";
  }
  return ok ? kOk : kFail;
}

// ------------------------------------------------------------------ residual

int cmd_residual(const Source& src, bool program, const std::string& out_path, std::ostream& out) {
  const Loaded l = load(src, true, false);
  ResidualOptions opts;
  if (!src.params.empty()) opts.params = l.params;
  const Pipeline p = compile_pipeline(l.graph, l.schedule, opts);
  const std::string text = program ? serialize_tile_program(p.program) : serialize_prdg(p.residual);
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kOk;
}

// ----------------------------------------------------------------------- run

struct RunArgs {
  std::int64_t b = 4;
  std::string variant;
  std::size_t workers = 1;
  std::string mode = "hsd";
  std::uint64_t seed = 1;
  std::int64_t timeout_ms = 60000;
  std::uint32_t jitter_us = 0;
  bool verify = false;
  bool overapprox = false;
  std::vector<std::string> drop;
  std::string trace_path, metrics_path, output_path;
};

std::unique_ptr<Kernel> kernel_for(const Loaded& l, const RunArgs& a) {
  if (l.info) return make_kernel(l.info->id, {l.params, a.b, a.variant, a.seed});
  return make_hash_kernel(l.graph, l.params);
}

int cmd_run(const Source& src, const RunArgs& a, std::ostream& out, std::ostream& err) {
  if (a.workers == 0) throw UsageError("--workers must be at least 1");
  if (a.mode != "hsd" && a.mode != "wavefront" && a.mode != "sequential") throw UsageError("unknown mode '" + a.mode + "'");
  const Loaded l = load(src);
  ResidualOptions ropts;
  ropts.params = l.params;
  const Pipeline pl = compile_pipeline(l.graph, l.schedule, ropts);
  TileProgram program = a.overapprox ? overapproximated_program(pl) : pl.program;
  for (const auto& d : a.drop) program = drop_clause(program, d);
  const ExecutionPlan plan = make_plan(l.graph, program, l.params);

  RunOptions opts;
  opts.workers = a.workers;
  opts.seed = a.seed;
  opts.timeout = std::chrono::milliseconds(a.timeout_ms);
  opts.jitter_us = a.jitter_us;
  opts.record_trace = a.verify || !a.trace_path.empty();

  auto kernel = kernel_for(l, a);
  RunResult res;
  if (a.mode == "hsd") {
    res = run_hsd(plan, *kernel, opts);
  } else if (a.mode == "wavefront") {
    res = run_wavefront(plan.graph, *kernel, opts);
  } else {
    res = run_sequential(plan.graph, *kernel, opts);
  }

  if (!a.trace_path.empty()) write_file(a.trace_path, res.trace.to_csv());
  if (!a.metrics_path.empty()) write_file(a.metrics_path, RunMetrics::csv_header() + "\n" + res.metrics.csv_row() + "\n");
  if (!a.output_path.empty()) write_file(a.output_path, res.output.to_csv());

  out << "status: " << to_string(res.status) << "\n";
  out << "checksum: " << res.output.checksum() << "\n";
  out << RunMetrics::csv_header() << "\n" << res.metrics.csv_row() << "\n";
  if (res.status != RunStatus::Completed) {
    err << res.diagnostic;
    if (!res.diagnostic.empty() && res.diagnostic.back() != '\n') err << "\n";
    return kFail;
  }
  if (!a.verify) return kOk;

  bool ok = true;
  auto fresh = kernel_for(l, a);
  const RunResult oracle = run_sequential(plan.graph, *fresh, {1, opts.timeout, false, a.seed, 0, 2});
  if (oracle.output != res.output) {
    out << "verify: output differs from the sequential run\n";
    ok = false;
  }
  if (l.info && reference_eval(l.info->id, {l.params, a.b, a.variant, a.seed}) != oracle.output) {
    out << "verify: sequential run differs from the reference evaluation\n";
    ok = false;
  }
  const TraceReport tr = verify_trace(res.trace, l.graph, l.params);
  out << "verify: " << tr.instances << " dependence instances, " << tr.violation_count << " trace violations\n";
  for (const auto& v : tr.violations) out << "  " << v.message << "\n";
  ok = ok && tr.clean();
  if (a.mode == "hsd") {
    const AuditReport audit = audit_plan(plan);
    out << "verify: " << audit.instances << " tile dependences, " << audit.static_order << " ordered on one processor, "
        << audit.checked << " checked, " << audit.missing_count << " unguarded\n";
    for (const auto& m : audit.missing) out << "  unguarded: " << m << "\n";
    ok = ok && audit.complete();
  }
  out << "verify: " << (ok ? "ok" : "FAILED") << "\n";
  return ok ? kOk : kFail;
}

// --------------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<std::string> sizes;
  std::string workers = "1,2,4,8";
  std::int64_t b = 4;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string report_path;
};

int cmd_bench(const Source& src, const BenchArgs& a, std::ostream& out) {
  if (src.benchmark.empty()) throw UsageError("bench needs --benchmark");
  const auto& info = find_benchmark(src.benchmark);
  find_mapping(info, src.mapping);
  const auto workers = parse_list(a.workers, "--workers");
  for (auto w : workers)
    if (w == 0) throw UsageError("--workers entries must be at least 1");
  std::vector<Point> sizes;
  for (const auto& s : a.sizes) sizes.push_back(parse_point(s));
  if (sizes.empty()) {
    for (std::int64_t div : {4, 2, 1}) {
      Point p = info.desk_params;
      for (auto& v : p) v = std::max<std::int64_t>(2, v / div);
      sizes.push_back(p);
    }
  }

  std::ostringstream csv, timing, report;
  csv << "benchmark,mapping,params,mode,workers,tiles,tasks,checks,checks_per_tile,barriers,state_entries,checksum,"
         "matches_reference\n";
  timing << "benchmark,mapping,params,mode,workers,wall_time_s,total_spins,blocked_waits\n";
  std::vector<double> scale, task_ratio;
  bool ok = true;
  for (const auto& s : sizes) {
    if (s.size() != info.params.size()) throw UsageError("--size needs " + std::to_string(info.params.size()) + " values");
    ResidualOptions ropts;
    ropts.params = s;
    const Pipeline pl = load_benchmark(info.id, src.mapping, ropts);
    const ExecutionPlan plan = make_plan(pl.graph, pl.program, s);
    const KernelConfig cfg{s, a.b, "", a.seed};
    const KernelOutput expected = reference_eval(info.id, cfg);
    std::string ps = to_string(s);
    for (auto& ch : ps)
      if (ch == ',') ch = ' ';
    std::size_t hsd_tasks = 0, wf_tasks = 0;
    for (auto w : workers) {
      RunOptions opts;
      opts.workers = w;
      opts.seed = a.seed;
      opts.record_trace = false;
      for (const std::string mode : {"hsd", "wavefront"}) {
        auto kernel = make_kernel(info.id, cfg);
        const RunResult r = mode == "hsd" ? run_hsd(plan, *kernel, opts) : run_wavefront(plan.graph, *kernel, opts);
        const bool match = r.status == RunStatus::Completed && r.output == expected;
        ok = ok && match;
        const auto& m = r.metrics;
        csv << info.id << ',' << src.mapping << ',' << ps << ',' << mode << ',' << w << ',' << plan.graph.tiles.size() << ','
            << m.tasks_spawned << ',' << m.checks_executed << ','
            << static_cast<double>(m.checks_executed) / static_cast<double>(plan.graph.tiles.size()) << ',' << m.barriers
            << ',' << m.state_entries << ',' << r.output.checksum() << ',' << (match ? 1 : 0) << '\n';
        timing << info.id << ',' << src.mapping << ',' << ps << ',' << mode << ',' << w << ',' << m.wall_time_s << ','
               << m.total_spins << ',' << m.blocked_waits << '\n';
        (mode == "hsd" ? hsd_tasks : wf_tasks) = m.tasks_spawned;
      }
    }
    const FormulaComparison fc = metrics_against_formulas(info.id, src.mapping, s);
    report << fc.summary() << (fc.checks_match() && fc.tiles_match() ? "" : "  MISMATCH") << "\n";
    ok = ok && fc.checks_match() && fc.tiles_match();
    scale.push_back(static_cast<double>(s.back()));
    task_ratio.push_back(static_cast<double>(wf_tasks) / static_cast<double>(hsd_tasks));
  }
  if (sizes.size() >= 2) {
    report << "log-log slope of wavefront/hsd task ratio against " << info.params.back() << ": "
           << loglog_slope(scale, task_ratio) << "\n";
  }
  report << (ok ? "all runs match the reference\n" : "some runs FAILED\n");

  if (!a.out_path.empty()) {
    write_file(a.out_path, csv.str());
    write_file(a.out_path + ".timing.csv", timing.str());
  } else {
    out << csv.str();
  }
  if (!a.report_path.empty()) write_file(a.report_path, report.str());
  out << report.str();
  return ok ? kOk : kFail;
}

// ---------------------------------------------------------------------- emit

int cmd_emit(const Source& src, const std::string& target, const std::string& out_path, std::ostream& out) {
  EmitTarget t;
  try {
    t = parse_emit_target(target);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const Loaded l = load(src, true, false);
  const Pipeline p = compile_pipeline(l.graph, l.schedule);
  const std::string title = !src.benchmark.empty() ? src.benchmark + "/" + src.mapping : "program";
  const std::string text = emit(p.program, t, title);
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kOk;
}

// -------------------------------------------------------------- verify-trace

int cmd_verify_trace(const Source& src, const std::string& trace_path, std::ostream& out) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + trace_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const ExecutionTrace trace = parse_trace_csv(buf.str());
  const Loaded l = load(src, false);
  const TraceReport r = verify_trace(trace, l.graph, l.params);
  out << r.tiles << " tiles, " << r.instances << " dependence instances, " << r.violation_count << " violations\n";
  for (const auto& v : r.violations) out << "  " << v.message << "\n";
  return r.clean() ? kOk : kFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid static/dynamic tile scheduling"};
  app.name("hsd");
  app.require_subcommand(1);

  Source src;
  std::string report_path, out_path, target = "pthreads", trace_path;
  bool json_out = false, program = false;
  RunArgs ra;
  BenchArgs ba;

  auto* validate = app.add_subcommand("validate", "Check a graph and schedule");
  src.add_to(validate);
  validate->add_option("--report", report_path, "Write the JSON report here");
  validate->add_flag("--json", json_out, "Print the JSON report instead of the summary");

  auto* residual = app.add_subcommand("residual", "Print the residual graph");
  src.add_to(residual);
  residual->add_flag("--program", program, "Print the tile program instead");
  residual->add_option("--out", out_path);

  auto* run_cmd = app.add_subcommand("run", "Execute a tiled program");
  src.add_to(run_cmd);
  run_cmd->add_option("--b", ra.b, "Tile size (benchmark kernels)")->capture_default_str();
  run_cmd->add_option("--variant", ra.variant, "Kernel variant");
  run_cmd->add_option("--workers", ra.workers)->capture_default_str();
  run_cmd->add_option("--mode", ra.mode, "hsd, wavefront or sequential")->capture_default_str();
  run_cmd->add_option("--seed", ra.seed)->capture_default_str();
  run_cmd->add_option("--timeout-ms", ra.timeout_ms)->capture_default_str();
  run_cmd->add_option("--jitter-us", ra.jitter_us, "Random per-tile delay bound")->capture_default_str();
  run_cmd->add_flag("--verify", ra.verify, "Compare with the sequential run and check the trace");
  run_cmd->add_flag("--overapprox", ra.overapprox, "Also check statically ordered dependences");
  run_cmd->add_option("--drop-clause", ra.drop, "Remove an acquire clause (node:index or edge name); for testing");
  run_cmd->add_option("--trace", ra.trace_path);
  run_cmd->add_option("--metrics", ra.metrics_path);
  run_cmd->add_option("--output", ra.output_path);

  auto* bench = app.add_subcommand("bench", "Size and worker sweeps against the wavefront baseline");
  src.add_to(bench);
  bench->add_option("--size", ba.sizes, "Comma-separated parameter values (repeatable)");
  bench->add_option("--workers", ba.workers)->capture_default_str();
  bench->add_option("--b", ba.b)->capture_default_str();
  bench->add_option("--seed", ba.seed)->capture_default_str();
  bench->add_option("--out", ba.out_path, "CSV file; wall times go to <out>.timing.csv");
  bench->add_option("--report", ba.report_path);

  auto* emit_cmd = app.add_subcommand("emit", "Generate C source");
  src.add_to(emit_cmd);
  emit_cmd->add_option("--target", target, "pthreads or generic_stubs")->capture_default_str();
  emit_cmd->add_option("--out", out_path);

  auto* vt = app.add_subcommand("verify-trace", "Check a trace file against a graph");
  src.add_to(vt);
  vt->add_option("--trace", trace_path)->required();

  std::vector<const char*> argv{"hsd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(src, report_path, json_out, out);
    if (*residual) return cmd_residual(src, program, out_path, out);
    if (*run_cmd) return cmd_run(src, ra, out, err);
    if (*bench) return cmd_bench(src, ba, out);
    if (*emit_cmd) return cmd_emit(src, target, out_path, out);
    if (*vt) return cmd_verify_trace(src, trace_path, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResolutionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kUsage;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}

}  // namespace hsd::cli
