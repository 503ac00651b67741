#pragma once

// Self-scheduling executor, the wavefront-barrier baseline and the
// sequential oracle.

#include "hsd/kernels.hpp"
#include "hsd/plan.hpp"
#include "hsd/trace.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

namespace hsd {

enum class RunStatus { Completed, Timeout, Error };
std::string_view to_string(RunStatus s);

struct RunMetrics {
  std::string mode;
  std::size_t workers = 0;
  std::size_t tasks_spawned = 0;
  std::size_t tiles_executed = 0;
  std::size_t checks_executed = 0;
  std::size_t obligations = 0;
  std::size_t total_spins = 0;
  std::size_t blocked_waits = 0;
  std::size_t state_entries = 0;
  std::size_t barriers = 0;
  double wall_time_s = 0;
  std::uint64_t seed = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

struct RunOptions {
  std::size_t workers = 1;
  std::chrono::milliseconds timeout{60000};
  bool record_trace = true;
  /// Seeds the per-tile delay; recorded in the metrics.
  std::uint64_t seed = 1;
  /// Each tile sleeps a seeded uniform 0..jitter_us microseconds first.
  std::uint32_t jitter_us = 0;
  std::size_t spin_limit = 2;
};

struct RunResult {
  RunStatus status = RunStatus::Error;
  KernelOutput output;
  ExecutionTrace trace;
  RunMetrics metrics;
  std::string diagnostic;
};

/// Per-entry completed-tile counters.  Each entry has one writer; readers
/// poll up to spin_limit times and then sleep until some entry changes.
class StateTable {
 public:
  explicit StateTable(std::size_t entries, std::size_t spin_limit = 2);

  std::int64_t value(std::size_t entry) const { return counts_[entry].load(std::memory_order_acquire); }

  struct WaitResult {
    bool satisfied = false;
    std::size_t spins = 0;  // failed polls
    bool blocked = false;
  };
  /// Returns once entry >= count, or unsatisfied on abort or at the deadline.
  WaitResult wait_until(std::size_t entry, std::int64_t count, std::chrono::steady_clock::time_point deadline);
  /// Entry must strictly increase.  Wakes every sleeping waiter.
  void publish(std::size_t entry, std::int64_t count);
  void abort();
  bool aborted() const { return aborted_.load(); }

 private:
  std::unique_ptr<std::atomic<std::int64_t>[]> counts_;
  std::size_t size_;
  std::size_t spin_limit_;
  std::atomic<bool> aborted_{false};
  std::atomic<std::size_t> waiters_{0};
  std::mutex mu_;
  std::condition_variable cv_;
};

/// Workers claim processors in lex order and run each one's tasks, checking
/// state entries before and publishing after every tile.
RunResult run_hsd(const ExecutionPlan& plan, Kernel& kernel, const RunOptions& opts = {});

/// Wave number of a tile; must strictly increase along every dependence.
using WaveFunction = std::function<std::int64_t(const TileRef&)>;
/// Sum of tile coordinates.
std::int64_t coordinate_sum_wave(const TileRef& t);

/// Tiles grouped by wave, each wave a parallel loop ending in a barrier.
RunResult run_wavefront(const TileGraph& g, Kernel& kernel, const RunOptions& opts = {},
                        const WaveFunction& wave = coordinate_sum_wave);

/// Single worker, topological order picking the lex-smallest ready tile.
/// Throws ScheduleError naming a cycle if the graph has one.
RunResult run_sequential(const TileGraph& g, Kernel& kernel, const RunOptions& opts = {});

}  // namespace hsd
