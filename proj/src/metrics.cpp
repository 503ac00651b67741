#include "hsd/metrics.hpp"

#include "hsd/error.hpp"
#include "hsd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace hsd {

namespace {

void note_interior(SyncProfile& p, std::size_t checks) {
  if (p.interior_tiles == 0) {
    p.min_interior_checks = p.max_interior_checks = checks;
  } else {
    p.min_interior_checks = std::min(p.min_interior_checks, checks);
    p.max_interior_checks = std::max(p.max_interior_checks, checks);
  }
  ++p.interior_tiles;
}

template <typename Sizes>
void note_task_sizes(SyncProfile& p, const Sizes& sizes) {
  p.procs = sizes.size();
  for (const auto& s : sizes) {
    const std::size_t n = s;
    p.max_tiles_per_task = std::max(p.max_tiles_per_task, n);
    p.min_tiles_per_task = p.min_tiles_per_task == 0 ? n : std::min(p.min_tiles_per_task, n);
  }
}

std::int64_t nb_squared_last(std::span<const std::int64_t> s) { return s.back() * s.back(); }
std::int64_t nb_last(std::span<const std::int64_t> s) { return s.back(); }

}  // namespace

bool is_interior(const Prdg& g, std::size_t node, std::span<const std::int64_t> tile, std::span<const std::int64_t> s) {
  const auto& dom = g.nodes[node].domain;
  const std::size_t d = tile.size();
  Point z(tile.begin(), tile.end());
  std::size_t combos = 1;
  for (std::size_t i = 0; i < d; ++i) combos *= 3;
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t rest = c;
    bool centre = true;
    for (std::size_t i = 0; i < d; ++i) {
      const auto delta = static_cast<std::int64_t>(rest % 3) - 1;
      rest /= 3;
      z[i] = tile[i] + delta;
      centre = centre && delta == 0;
    }
    if (!centre && !dom.contains(z, s)) return false;
  }
  return true;
}

SyncProfile measure_plan(const ExecutionPlan& plan, const Prdg& tiled) {
  SyncProfile p;
  std::vector<std::size_t> sizes;
  for (const auto& tasks : plan.tasks) {
    sizes.push_back(tasks.size());
    for (const auto& task : tasks) {
      ++p.tiles;
      const auto& tile = plan.graph.tiles[task.tile];
      if (is_interior(tiled, tile.node, tile.coords, plan.params)) note_interior(p, task.checks.size());
    }
  }
  note_task_sizes(p, sizes);
  p.state_entries = plan.entries.size() * (plan.n - plan.k);
  return p;
}

SyncProfile enumerate_profile(const Prdg& tiled, const HsdSchedule& sch, std::span<const std::int64_t> s) {
  SyncProfile p;
  std::vector<ConcreteAffineMap> pi;
  for (const auto& node : tiled.nodes) pi.emplace_back(sch.pi(node.name), s);

  std::map<Point, std::size_t> per_proc;
  std::set<std::pair<std::size_t, Point>> entries;
  std::map<std::pair<std::size_t, Point>, std::set<std::pair<std::size_t, Point>>> producers;
  for (std::size_t n = 0; n < tiled.nodes.size(); ++n) {
    if (tiled.nodes[n].is_input) continue;
    for (const auto& z : enumerate_points(tiled.nodes[n].domain, s)) {
      ++p.tiles;
      Point proc = pi[n].apply(z);
      ++per_proc[proc];
      entries.emplace(n, std::move(proc));
      producers[{n, z}];
    }
  }
  for_each_instance(tiled, s, true, [&](const DependenceInstance& d) {
    const auto& e = tiled.edges[d.edge];
    const std::size_t src = tiled.node_index(e.src);
    const std::size_t dst = tiled.node_index(e.pairs[d.pair].dst);
    Point from = pi[dst].apply(d.producer);
    if (from != pi[src].apply(d.consumer)) producers[{src, d.consumer}].emplace(dst, std::move(from));
    return true;
  });
  for (const auto& [tile, prods] : producers)
    if (is_interior(tiled, tile.first, tile.second, s)) note_interior(p, prods.size());
  std::vector<std::size_t> sizes;
  for (const auto& [proc, count] : per_proc) sizes.push_back(count);
  note_task_sizes(p, sizes);
  p.state_entries = entries.size() * (sch.n - sch.k);
  return p;
}

std::optional<TableFormula> table_formula(std::string_view benchmark, std::string_view mapping) {
  if (benchmark == "rex3d" && mapping == "m1") return TableFormula{1, "(N/b)^2", nb_squared_last};
  if (benchmark == "rex3d" && mapping == "m2") return TableFormula{2, "N/b", nb_last};
  if (benchmark == "jacobi1d" && mapping == "m1") return TableFormula{1, "N/b", nb_last};
  if (benchmark == "jacobi2d" && mapping == "m1") return TableFormula{1, "(N/b)^2", nb_squared_last};
  if (benchmark == "jacobi2d" && mapping == "m2") return TableFormula{3, "N/b", nb_last};
  if (benchmark == "ltmi" && mapping == "m1") return TableFormula{1, "(N/b)^2", nb_squared_last};
  return std::nullopt;
}

bool FormulaComparison::checks_match() const {
  const bool agree = measured.min_interior_checks == truth.min_interior_checks &&
                     measured.max_interior_checks == truth.max_interior_checks &&
                     measured.interior_tiles == truth.interior_tiles;
  // Too small to have interior tiles: nothing to compare against the table.
  if (!formula || measured.interior_tiles == 0) return agree;
  return agree && measured.min_interior_checks == formula->checks && measured.max_interior_checks == formula->checks;
}

bool FormulaComparison::tiles_match() const {
  const bool agree = measured.max_tiles_per_task == truth.max_tiles_per_task && measured.procs == truth.procs;
  if (!formula) return agree;
  return agree && static_cast<std::int64_t>(measured.max_tiles_per_task) == formula_tiles;
}

std::string FormulaComparison::summary() const {
  std::ostringstream os;
  os << benchmark << '/' << mapping << " at " << to_string(params) << ": checks per interior tile "
     << measured.min_interior_checks;
  if (measured.max_interior_checks != measured.min_interior_checks) os << ".." << measured.max_interior_checks;
  os << " (enumerated " << truth.min_interior_checks;
  if (truth.max_interior_checks != truth.min_interior_checks) os << ".." << truth.max_interior_checks;
  os << ", " << measured.interior_tiles << " interior tiles";
  if (formula) os << ", table " << formula->checks;
  os << "); tiles per task " << measured.max_tiles_per_task << " (enumerated " << truth.max_tiles_per_task;
  if (formula) os << ", table " << formula->tiles_per_task << " = " << formula_tiles;
  os << ")";
  return os.str();
}

FormulaComparison metrics_against_formulas(std::string_view benchmark, std::string_view mapping, const Point& params) {
  ResidualOptions opts;
  opts.params = params;
  const Pipeline pl = load_benchmark(benchmark, mapping, opts);
  const ExecutionPlan plan = make_plan(pl.graph, pl.program, params);
  FormulaComparison c;
  c.benchmark = benchmark;
  c.mapping = mapping;
  c.params = params;
  c.measured = measure_plan(plan, pl.graph);
  c.truth = enumerate_profile(pl.graph, pl.schedule, params);
  c.formula = table_formula(benchmark, mapping);
  if (c.formula) c.formula_tiles = c.formula->tiles(params);
  return c;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("slope fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace hsd
