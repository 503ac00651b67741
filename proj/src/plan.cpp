#include "hsd/plan.hpp"

#include "hsd/error.hpp"

#include <algorithm>
#include <tuple>

namespace hsd {

std::size_t TileGraph::find(std::size_t node, std::span<const std::int64_t> coords) const {
  if (node >= index_.size()) return tiles.size();
  auto it = index_[node].find(Point(coords.begin(), coords.end()));
  return it == index_[node].end() ? tiles.size() : it->second;
}

TileGraph build_tile_graph(const Prdg& g, std::span<const std::int64_t> s) {
  TileGraph tg;
  tg.index_.resize(g.nodes.size());
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    tg.node_names.push_back(g.nodes[n].name);
    if (g.nodes[n].is_input) continue;
    for (auto& z : enumerate_points(g.nodes[n].domain, s)) {
      tg.index_[n].emplace(z, tg.tiles.size());
      tg.tiles.push_back({n, std::move(z)});
    }
  }
  tg.preds.resize(tg.tiles.size());
  for_each_instance(g, s, true, [&](const DependenceInstance& d) {
    const auto& e = g.edges[d.edge];
    const std::size_t c = tg.find(g.node_index(e.src), d.consumer);
    const std::size_t p = tg.find(g.node_index(e.pairs[d.pair].dst), d.producer);
    if (c == tg.tiles.size() || p == tg.tiles.size()) {
      throw Error("edge " + e.name + ": instance " + to_string(d.consumer) + " -> " + to_string(d.producer) +
                  " leaves the node domains");
    }
    tg.preds[c].push_back(p);
    ++tg.instances;
    return true;
  });
  for (auto& p : tg.preds) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  return tg;
}

std::size_t ExecutionPlan::task_count() const {
  std::size_t c = 0;
  for (const auto& t : tasks) c += t.size();
  return c;
}

std::size_t ExecutionPlan::check_count() const {
  std::size_t c = 0;
  for (const auto& ts : tasks)
    for (const auto& t : ts) c += t.checks.size();
  return c;
}

ExecutionPlan make_plan(const Prdg& tiled, const TileProgram& tp, std::span<const std::int64_t> s) {
  ExecutionPlan plan;
  plan.n = tp.n;
  plan.k = tp.k;
  plan.params.assign(s.begin(), s.end());
  plan.graph = build_tile_graph(tiled, s);
  const CompiledProgram cp(tp, s);
  const auto& graph = plan.graph;

  std::map<std::pair<std::size_t, Point>, std::size_t> entry_of;
  std::vector<std::size_t> program_node_of_tile(graph.tiles.size(), tp.nodes.size());
  plan.spacetime.resize(graph.tiles.size());

  struct Pending {
    Point proc;
    Point time;
    std::size_t node;
    std::size_t tile;
    std::size_t entry;
  };
  std::vector<Pending> pending;

  for (std::size_t i = 0; i < tp.nodes.size(); ++i) {
    const auto& node = tp.nodes[i];
    plan.program_nodes.push_back(node.name);
    const std::size_t gnode = tiled.node_index(node.name);
    for (auto& pt : enumerate_points(node.domain, s)) {
      const Point tile = cp.tile_coords(i, pt);
      const std::size_t ti = graph.find(gnode, tile);
      if (ti == graph.tiles.size()) {
        throw ScheduleError("space-time point " + to_string(pt) + " of " + node.name + " maps to " + to_string(tile) +
                            ", which is not a tile");
      }
      if (program_node_of_tile[ti] != tp.nodes.size()) {
        throw ScheduleError("tile " + to_string(tile) + " of " + node.name + " has two space-time points");
      }
      program_node_of_tile[ti] = i;
      Point proc(pt.begin(), pt.begin() + static_cast<std::ptrdiff_t>(tp.k));
      Point time(pt.begin() + static_cast<std::ptrdiff_t>(tp.k), pt.end());
      auto [it, fresh] = entry_of.try_emplace({i, proc}, plan.entries.size());
      if (fresh) plan.entries.push_back({i, proc, {}});
      plan.entries[it->second].times.push_back(time);
      plan.spacetime[ti] = pt;
      pending.push_back({std::move(proc), std::move(time), i, ti, it->second});
    }
  }
  for (std::size_t ti = 0; ti < graph.tiles.size(); ++ti) {
    if (program_node_of_tile[ti] == tp.nodes.size()) {
      throw ScheduleError("tile " + to_string(graph.tiles[ti].coords) + " of " +
                          graph.node_names[graph.tiles[ti].node] + " has no space-time point");
    }
  }
  // Points come out of the enumeration lex-sorted per node, so every entry's
  // time list is already ordered.

  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.proc, a.time, a.node) < std::tie(b.proc, b.time, b.node);
  });
  std::vector<Obligation> obs;
  for (auto& pd : pending) {
    if (plan.procs.empty() || plan.procs.back() != pd.proc) {
      plan.procs.push_back(pd.proc);
      plan.tasks.emplace_back();
    }
    Task task{pd.tile, pd.node, pd.entry, pd.time, {}, 0};
    obs.clear();
    cp.obligations(pd.node, pd.proc, pd.time, obs);
    task.obligations = obs.size();
    for (const auto& ob : obs) {
      auto where = [&] { return tp.nodes[pd.node].name + " at " + to_string(pd.proc) + "," + to_string(pd.time); };
      auto e = entry_of.find({ob.producer, ob.proc});
      if (e == entry_of.end()) {
        throw ScheduleError(where() + ": producer " + tp.nodes[ob.producer].name + " has no processor " +
                            to_string(ob.proc));
      }
      const auto& times = plan.entries[e->second].times;
      auto pos = std::lower_bound(times.begin(), times.end(), ob.time);
      if (pos == times.end()) {
        throw ScheduleError(where() + ": producer " + tp.nodes[ob.producer].name + " at " + to_string(ob.proc) +
                            " never reaches time " + to_string(ob.time));
      }
      const std::int64_t count = pos - times.begin() + 1;
      auto same = std::find_if(task.checks.begin(), task.checks.end(), [&](const Check& c) { return c.entry == e->second; });
      if (same == task.checks.end()) {
        task.checks.push_back({e->second, count, ob.clause, ob.target});
      } else if (count > same->count) {
        *same = {e->second, count, ob.clause, ob.target};
      }
    }
    plan.tasks.back().push_back(std::move(task));
  }
  return plan;
}

AuditReport audit_plan(const ExecutionPlan& plan, std::size_t max_reported) {
  struct Slot {
    std::size_t proc = 0;
    std::size_t position = 0;
    const Task* task = nullptr;
  };
  std::vector<Slot> where(plan.graph.tiles.size());
  for (std::size_t v = 0; v < plan.tasks.size(); ++v)
    for (std::size_t i = 0; i < plan.tasks[v].size(); ++i) where[plan.tasks[v][i].tile] = {v, i, &plan.tasks[v][i]};

  AuditReport rep;
  auto label = [&](std::size_t tile) {
    const auto& t = plan.graph.tiles[tile];
    return plan.graph.node_names[t.node] + to_string(t.coords);
  };
  for (std::size_t c = 0; c < plan.graph.tiles.size(); ++c) {
    const Slot& cs = where[c];
    for (std::size_t p : plan.graph.preds[c]) {
      ++rep.instances;
      const Slot& ps = where[p];
      if (ps.proc == cs.proc && ps.position < cs.position) {
        ++rep.static_order;
        continue;
      }
      const auto& entry = plan.entries[ps.task->entry];
      const auto needed = std::lower_bound(entry.times.begin(), entry.times.end(), ps.task->time) - entry.times.begin() + 1;
      const auto& checks = cs.task->checks;
      const bool ok = ps.proc != cs.proc && std::any_of(checks.begin(), checks.end(), [&](const Check& k) {
        return k.entry == ps.task->entry && k.count >= needed;
      });
      if (ok) {
        ++rep.checked;
        continue;
      }
      if (rep.missing.size() < max_reported) rep.missing.push_back(label(c) + " <- " + label(p));
      ++rep.missing_count;
    }
  }
  return rep;
}

}  // namespace hsd
