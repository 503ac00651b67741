#include "hsd/runtime.hpp"

#include "hsd/error.hpp"

#include <omp.h>

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>
#include <thread>

namespace hsd {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void jitter(const RunOptions& opts, std::size_t tile) {
  if (opts.jitter_us == 0) return;
  const auto us = splitmix(opts.seed * 0x100000001b3ULL + tile) % (opts.jitter_us + 1ULL);
  std::this_thread::sleep_for(std::chrono::microseconds(us));
}

class Recorder {
 public:
  Recorder(bool on, std::size_t workers) : on_(on), buffers_(workers) {}

  void add(std::size_t worker, std::size_t tile, EventKind kind, std::size_t spins = 0) {
    if (!on_) return;
    const std::uint64_t seq = seq_.fetch_add(1);
    buffers_[worker].push_back({seq, static_cast<std::uint32_t>(worker), static_cast<std::uint32_t>(tile), kind,
                                static_cast<std::uint32_t>(spins)});
  }

  std::vector<TraceEvent> merge() {
    std::vector<TraceEvent> out;
    for (auto& b : buffers_) out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end(), [](const TraceEvent& a, const TraceEvent& b) { return a.seq < b.seq; });
    return out;
  }

 private:
  bool on_;
  std::atomic<std::uint64_t> seq_{0};
  std::vector<std::vector<TraceEvent>> buffers_;
};

ExecutionTrace graph_trace(const TileGraph& g) {
  ExecutionTrace t;
  t.node_names = g.node_names;
  t.tiles = g.tiles;
  for (const auto& tile : g.tiles) t.n = std::max(t.n, tile.coords.size());
  t.spacetime.reserve(g.tiles.size());
  for (const auto& tile : g.tiles) t.spacetime.push_back(tile.coords);
  return t;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_workers(const RunOptions& opts) {
  if (opts.workers == 0) throw Error("at least one worker is required");
}

std::string tile_label(const TileGraph& g, std::size_t tile) {
  return g.node_names[g.tiles[tile].node] + to_string(g.tiles[tile].coords);
}

}  // namespace

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Timeout: return "timeout";
    case RunStatus::Error: return "error";
  }
  return "?";
}

std::string RunMetrics::csv_header() {
  return "mode,workers,tasks_spawned,tiles_executed,checks_executed,obligations,total_spins,blocked_waits,"
         "state_entries,barriers,wall_time_s,seed";
}

std::string RunMetrics::csv_row() const {
  std::ostringstream os;
  os << mode << ',' << workers << ',' << tasks_spawned << ',' << tiles_executed << ',' << checks_executed << ','
     << obligations << ',' << total_spins << ',' << blocked_waits << ',' << state_entries << ',' << barriers << ','
     << wall_time_s << ',' << seed;
  return os.str();
}

// --------------------------------------------------------------- state table

StateTable::StateTable(std::size_t entries, std::size_t spin_limit)
    : counts_(new std::atomic<std::int64_t>[entries]), size_(entries), spin_limit_(spin_limit) {
  for (std::size_t i = 0; i < size_; ++i) counts_[i].store(0, std::memory_order_relaxed);
}

StateTable::WaitResult StateTable::wait_until(std::size_t entry, std::int64_t count, Clock::time_point deadline) {
  WaitResult r;
  for (std::size_t polls = 0; polls < spin_limit_; ++polls) {
    if (counts_[entry].load(std::memory_order_acquire) >= count) {
      r.satisfied = true;
      return r;
    }
    if (aborted_.load()) return r;
    ++r.spins;
  }
  if (counts_[entry].load(std::memory_order_acquire) >= count) {
    r.satisfied = true;
    return r;
  }
  r.blocked = true;
  std::unique_lock lk(mu_);
  // Paired with publish(): either the publisher sees the waiter count or
  // the waiter sees the new value below.
  waiters_.fetch_add(1);
  while (counts_[entry].load() < count && !aborted_.load()) {
    const auto now = Clock::now();
    if (now >= deadline) break;
    cv_.wait_until(lk, std::min(deadline, now + std::chrono::milliseconds(50)));
  }
  waiters_.fetch_sub(1);
  r.satisfied = counts_[entry].load() >= count;
  return r;
}

void StateTable::publish(std::size_t entry, std::int64_t count) {
  if (count <= counts_[entry].load(std::memory_order_relaxed)) {
    throw Error("state entry " + std::to_string(entry) + " would not increase");
  }
  counts_[entry].store(count);
  if (waiters_.load() > 0) {
    std::lock_guard lk(mu_);
    cv_.notify_all();
  }
}

void StateTable::abort() {
  aborted_.store(true);
  std::lock_guard lk(mu_);
  cv_.notify_all();
}

// ------------------------------------------------------------------- run_hsd

RunResult run_hsd(const ExecutionPlan& plan, Kernel& kernel, const RunOptions& opts) {
  require_workers(opts);
  const std::size_t workers = opts.workers;
  StateTable state(plan.entries.size(), opts.spin_limit);
  Recorder rec(opts.record_trace, workers);
  std::atomic<std::size_t> next_proc{0};

  struct WorkerStats {
    std::size_t tasks = 0, tiles = 0, checks = 0, obligations = 0, spins = 0, blocked = 0;
    const Task* waiting = nullptr;
    const Check* unmet = nullptr;
    bool timed_out = false;
  };
  std::vector<WorkerStats> stats(workers);
  std::mutex error_mu;
  std::string error;

  const auto start = Clock::now();
  const auto deadline = start + opts.timeout;
  std::size_t actual = 0;
  omp_set_dynamic(0);
#pragma omp parallel num_threads(static_cast<int>(workers))
  {
    const auto w = static_cast<std::size_t>(omp_get_thread_num());
#pragma omp single
    actual = static_cast<std::size_t>(omp_get_num_threads());
    WorkerStats& me = stats[w];
    try {
      for (;;) {
        if (state.aborted()) break;
        const std::size_t v = next_proc.fetch_add(1);
        if (v >= plan.procs.size()) break;
        ++me.tasks;
        const auto& tasks = plan.tasks[v];
        rec.add(w, tasks.front().tile, EventKind::Claim);
        bool stop = false;
        for (const auto& task : tasks) {
          rec.add(w, task.tile, EventKind::AcquireBegin);
          std::size_t spins = 0;
          me.obligations += task.obligations;
          for (const auto& check : task.checks) {
            ++me.checks;
            const auto r = state.wait_until(check.entry, check.count, deadline);
            spins += r.spins;
            me.blocked += r.blocked ? 1 : 0;
            if (!r.satisfied) {
              me.waiting = &task;
              me.unmet = &check;
              if (!state.aborted()) {
                me.timed_out = true;
                state.abort();
              }
              stop = true;
              break;
            }
          }
          me.spins += spins;
          if (stop) break;
          rec.add(w, task.tile, EventKind::AcquireEnd, spins);
          jitter(opts, task.tile);
          const TileRef& tile = plan.graph.tiles[task.tile];
          rec.add(w, task.tile, EventKind::TileBegin);
          kernel.execute_tile(tile.node, tile.coords);
          rec.add(w, task.tile, EventKind::TileEnd);
          ++me.tiles;
          rec.add(w, task.tile, EventKind::Update);
          const std::int64_t done = state.value(task.entry) + 1;
          if (plan.entries[task.entry].times[static_cast<std::size_t>(done - 1)] != task.time) {
            throw Error("task order does not match the state entry's time list");
          }
          state.publish(task.entry, done);
        }
        if (stop) break;
      }
    } catch (const std::exception& e) {
      {
        std::lock_guard lk(error_mu);
        if (error.empty()) error = e.what();
      }
      state.abort();
    }
  }

  RunResult res;
  res.metrics.mode = "hsd";
  res.metrics.workers = actual;
  res.metrics.seed = opts.seed;
  res.metrics.state_entries = plan.entries.size() * (plan.n - plan.k);
  bool timed_out = false;
  for (const auto& s : stats) {
    res.metrics.tasks_spawned += s.tasks;
    res.metrics.tiles_executed += s.tiles;
    res.metrics.checks_executed += s.checks;
    res.metrics.obligations += s.obligations;
    res.metrics.total_spins += s.spins;
    res.metrics.blocked_waits += s.blocked;
    timed_out = timed_out || s.timed_out;
  }
  res.metrics.wall_time_s = seconds_since(start);

  if (!error.empty()) {
    res.status = RunStatus::Error;
    res.diagnostic = error;
  } else if (timed_out) {
    res.status = RunStatus::Timeout;
    std::ostringstream os;
    os << "timeout after " << opts.timeout.count() << " ms (suspected deadlock); blocked obligations:\n";
    auto describe_entry = [&](std::size_t e) {
      const auto& entry = plan.entries[e];
      std::ostringstream d;
      d << plan.program_nodes[entry.program_node] << " at p=" << to_string(entry.proc);
      return d.str();
    };
    for (std::size_t w = 0; w < workers; ++w) {
      const auto& s = stats[w];
      if (!s.waiting) continue;
      const auto& entry = plan.entries[s.unmet->entry];
      const std::int64_t have = state.value(s.unmet->entry);
      os << "  worker " << w << ": " << plan.program_nodes[s.waiting->program_node]
         << " at p=" << to_string(plan.entries[s.waiting->entry].proc) << " t=" << to_string(s.waiting->time)
         << " waits for " << describe_entry(s.unmet->entry) << " to reach t="
         << to_string(entry.times[static_cast<std::size_t>(s.unmet->count - 1)]) << " (clause " << s.unmet->clause
         << ", target " << s.unmet->target << "); it is at "
         << (have == 0 ? std::string("BOTTOM") : "t=" + to_string(entry.times[static_cast<std::size_t>(have - 1)]))
         << "\n";
    }
    os << "state entries not complete:\n";
    std::size_t shown = 0;
    for (std::size_t e = 0; e < plan.entries.size(); ++e) {
      const std::int64_t have = state.value(e);
      const auto total = static_cast<std::int64_t>(plan.entries[e].times.size());
      if (have == total) continue;
      if (++shown > 32) {
        os << "  ...\n";
        break;
      }
      os << "  " << describe_entry(e) << ": " << have << "/" << total << " tiles\n";
    }
    res.diagnostic = os.str();
  } else if (res.metrics.tiles_executed != plan.task_count()) {
    res.status = RunStatus::Error;
    res.diagnostic = "run ended with " + std::to_string(res.metrics.tiles_executed) + " of " +
                     std::to_string(plan.task_count()) + " tiles executed";
  } else {
    res.status = RunStatus::Completed;
  }

  res.output = kernel.output();
  res.trace.n = plan.n;
  res.trace.k = plan.k;
  res.trace.node_names = plan.graph.node_names;
  res.trace.tiles = plan.graph.tiles;
  res.trace.spacetime = plan.spacetime;
  res.trace.events = rec.merge();
  return res;
}

// ------------------------------------------------------------------ baselines

std::int64_t coordinate_sum_wave(const TileRef& t) {
  std::int64_t w = 0;
  for (auto c : t.coords) w += c;
  return w;
}

RunResult run_wavefront(const TileGraph& g, Kernel& kernel, const RunOptions& opts, const WaveFunction& wave) {
  require_workers(opts);
  std::vector<std::int64_t> w(g.tiles.size());
  for (std::size_t i = 0; i < g.tiles.size(); ++i) w[i] = wave(g.tiles[i]);
  std::map<std::int64_t, std::vector<std::size_t>> waves;
  for (std::size_t i = 0; i < g.tiles.size(); ++i) {
    for (std::size_t p : g.preds[i]) {
      if (w[p] >= w[i]) {
        throw ScheduleError("wavefront function does not increase from " + tile_label(g, p) + " (wave " +
                            std::to_string(w[p]) + ") to " + tile_label(g, i) + " (wave " + std::to_string(w[i]) + ")");
      }
    }
    waves[w[i]].push_back(i);
  }

  const std::size_t workers = opts.workers;
  Recorder rec(opts.record_trace, workers);
  std::mutex error_mu;
  std::string error;
  std::atomic<bool> failed{false};
  std::size_t actual = 1;
  const auto start = Clock::now();
  omp_set_dynamic(0);
  for (const auto& [value, tiles] : waves) {
    const auto count = static_cast<std::ptrdiff_t>(tiles.size());
#pragma omp parallel for num_threads(static_cast<int>(workers)) schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      if (failed.load()) continue;
      const auto wk = static_cast<std::size_t>(omp_get_thread_num());
      if (wk == 0) actual = static_cast<std::size_t>(omp_get_num_threads());
      const std::size_t t = tiles[static_cast<std::size_t>(i)];
      try {
        jitter(opts, t);
        rec.add(wk, t, EventKind::TileBegin);
        kernel.execute_tile(g.tiles[t].node, g.tiles[t].coords);
        rec.add(wk, t, EventKind::TileEnd);
      } catch (const std::exception& e) {
        std::lock_guard lk(error_mu);
        if (error.empty()) error = e.what();
        failed.store(true);
      }
    }
    if (failed.load()) break;
  }

  RunResult res;
  res.metrics.mode = "wavefront";
  res.metrics.workers = std::max(actual, std::size_t{1});
  res.metrics.seed = opts.seed;
  res.metrics.tasks_spawned = g.tiles.size();
  res.metrics.tiles_executed = failed ? 0 : g.tiles.size();
  res.metrics.barriers = waves.size();
  res.metrics.wall_time_s = seconds_since(start);
  res.status = failed ? RunStatus::Error : RunStatus::Completed;
  res.diagnostic = error;
  res.output = kernel.output();
  res.trace = graph_trace(g);
  res.trace.events = rec.merge();
  return res;
}

RunResult run_sequential(const TileGraph& g, Kernel& kernel, const RunOptions& opts) {
  const std::size_t n = g.tiles.size();
  std::vector<std::size_t> indegree(n);
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t i = 0; i < n; ++i) {
    indegree[i] = g.preds[i].size();
    for (std::size_t p : g.preds[i]) succ[p].push_back(i);
  }
  auto later = [&](std::size_t a, std::size_t b) {
    const auto& x = g.tiles[a];
    const auto& y = g.tiles[b];
    return std::tie(x.coords, x.node) > std::tie(y.coords, y.node);
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t t = ready.top();
    ready.pop();
    order.push_back(t);
    for (std::size_t s : succ[t])
      if (--indegree[s] == 0) ready.push(s);
  }
  if (order.size() != n) {
    // Every unfinished tile has an unfinished producer: walk back until a repeat.
    std::size_t t = 0;
    while (indegree[t] == 0) ++t;
    std::vector<std::size_t> path;
    std::vector<std::size_t> pos(n, n);
    while (pos[t] == n) {
      pos[t] = path.size();
      path.push_back(t);
      t = *std::find_if(g.preds[t].begin(), g.preds[t].end(), [&](std::size_t p) { return indegree[p] > 0; });
    }
    std::string cycle;
    for (std::size_t i = path.size(); i-- > pos[t];) cycle += tile_label(g, path[i]) + " -> ";
    cycle += tile_label(g, path.back());
    throw ScheduleError("tile dependence cycle: " + cycle);
  }

  Recorder rec(opts.record_trace, 1);
  const auto start = Clock::now();
  for (std::size_t t : order) {
    rec.add(0, t, EventKind::TileBegin);
    kernel.execute_tile(g.tiles[t].node, g.tiles[t].coords);
    rec.add(0, t, EventKind::TileEnd);
  }
  RunResult res;
  res.status = RunStatus::Completed;
  res.metrics.mode = "sequential";
  res.metrics.workers = 1;
  res.metrics.seed = opts.seed;
  res.metrics.tasks_spawned = 1;
  res.metrics.tiles_executed = n;
  res.metrics.wall_time_s = seconds_since(start);
  res.output = kernel.output();
  res.trace = graph_trace(g);
  res.trace.events = rec.merge();
  return res;
}

}  // namespace hsd
