#include "../tools/cli.hpp"

#include "hsd/kernels.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using hsd::data_path;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result hsd_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = hsd::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hsd_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

const std::string kRex = data_path("rex_tiled.prdg.json");

}  // namespace

TEST_CASE("validate") {
  const Result ok = hsd_cli({"validate", "--prdg", kRex, "--schedule", data_path("rex.sched.json"), "--param", "M_b=4",
                             "--param", "N_b=4"});
  CHECK(ok.code == 0);
  CHECK(ok.out == "legal, deadlock-free, 2 residual edges\n");

  const Result bad = hsd_cli({"validate", "--prdg", kRex, "--schedule", data_path("rex_bad.sched.json"), "--param",
                              "M_b=4", "--param", "N_b=4"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("not partially legal: edge e1") != std::string::npos);

  const Result missing = hsd_cli({"validate", "--prdg", kRex, "--schedule", "/nonexistent.json", "--param", "M_b=4",
                                  "--param", "N_b=4"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  CHECK(hsd_cli({"validate", "--prdg", kRex, "--schedule", data_path("rex.sched.json")}).code == 2);
  CHECK(hsd_cli({"validate", "--prdg", kRex, "--schedule", data_path("rex.sched.json"), "--param", "M_b"}).code == 2);
  CHECK(hsd_cli({}).code == 2);
  CHECK(hsd_cli({"frobnicate"}).code == 2);

  const auto report = scratch("report.json");
  const Result j = hsd_cli({"validate", "--benchmark", "rex3d", "--mapping", "m2", "--report", report.string()});
  CHECK(j.code == 0);
  CHECK(read(report).find("\"ok\": true") != std::string::npos);
}

TEST_CASE("residual") {
  const Result r = hsd_cli({"residual", "--prdg", kRex, "--schedule", data_path("rex.sched.json")});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"provenance\": \"e1/0\"") != std::string::npos);
  CHECK(r.out.find("\"e3\"") == std::string::npos);
  const Result p = hsd_cli({"residual", "--benchmark", "rex2d", "--program"});
  CHECK(p.code == 0);
}

TEST_CASE("run") {
  const std::vector<std::string> base{"run", "--benchmark", "rex2d", "--param", "M_b=6", "--param", "N_b=6"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return hsd_cli(a);
  };
  const Result ok = with({"--workers", "4", "--verify"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("verify: ok") != std::string::npos);

  const Result dropped = with({"--workers", "4", "--verify", "--drop-clause", "e1"});
  CHECK(dropped.code == 1);
  CHECK(dropped.out.find("verify: FAILED") != std::string::npos);

  CHECK(with({"--workers", "0"}).code == 2);
  CHECK(with({"--mode", "fastest"}).code == 2);
  CHECK(with({"--mode", "wavefront", "--verify"}).code == 0);
  CHECK(with({"--mode", "sequential", "--verify"}).code == 0);
  CHECK(with({"--overapprox", "--workers", "2", "--verify"}).code == 0);

  const auto trace = scratch("trace.csv");
  const auto output = scratch("out.csv");
  CHECK(with({"--workers", "2", "--trace", trace.string(), "--output", output.string()}).code == 0);
  CHECK(read(output).rfind("# type=u64 shape=27x27", 0) == 0);
  const Result vt = hsd_cli({"verify-trace", "--benchmark", "rex2d", "--param", "M_b=6", "--param", "N_b=6", "--trace",
                             trace.string()});
  CHECK(vt.code == 0);
  CHECK(vt.out.find(" 0 violations") != std::string::npos);
  // The same trace does not fit a larger graph.
  CHECK(hsd_cli({"verify-trace", "--benchmark", "rex2d", "--param", "M_b=7", "--param", "N_b=6", "--trace",
                 trace.string()})
            .code == 1);
}

TEST_CASE("bench") {
  const auto out = scratch("bench.csv");
  const std::vector<std::string> args{"bench",   "--benchmark", "rex3d", "--size", "2", "--size",
                                      "4",       "--workers",   "1,2",   "--out",  out.string()};
  const Result r = hsd_cli(args);
  CHECK(r.code == 0);
  CHECK(r.out.find("log-log slope") != std::string::npos);
  const std::string first = read(out);
  CHECK(first.rfind("benchmark,mapping,params,mode,workers,", 0) == 0);
  CHECK(hsd_cli(args).code == 0);
  CHECK(read(out) == first);
  CHECK(std::filesystem::exists(out.string() + ".timing.csv"));
  CHECK(hsd_cli({"bench", "--benchmark", "nope"}).code == 2);
  CHECK(hsd_cli({"bench", "--benchmark", "rex3d", "--workers", "0"}).code == 2);
}

TEST_CASE("emit") {
  const auto out = scratch("rex.c");
  CHECK(hsd_cli({"emit", "--prdg", kRex, "--schedule", data_path("rex.sched.json"), "--out", out.string()}).code == 0);
  CHECK(read(out).find("hsd_run") != std::string::npos);
  const Result cuda = hsd_cli({"emit", "--benchmark", "rex2d", "--target", "cuda"});
  CHECK(cuda.code == 2);
  CHECK(cuda.err.find("documented, not emitted") != std::string::npos);
  CHECK(hsd_cli({"emit", "--benchmark", "rex2d", "--out", "/nonexistent/dir/x.c"}).code == 2);
}
