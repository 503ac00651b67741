#pragma once

// Execution traces and the happens-before checker.

#include "hsd/plan.hpp"
#include "hsd/prdg.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hsd {

enum class EventKind : std::uint8_t { Claim, AcquireBegin, AcquireEnd, TileBegin, TileEnd, Update };

std::string_view to_string(EventKind k);
EventKind parse_event_kind(std::string_view s);

struct TraceEvent {
  std::uint64_t seq = 0;
  std::uint32_t worker = 0;
  std::uint32_t tile = 0;  // index into ExecutionTrace::tiles
  EventKind kind = EventKind::Claim;
  std::uint32_t spins = 0;  // acquire_end only

  bool operator==(const TraceEvent&) const = default;
};

/// Events sorted by seq.  Tiles are named by node and tile coordinates;
/// `spacetime` gives each tile's (p, t) when the run had a schedule,
/// otherwise k = 0 and the tile coordinates stand in for t.
struct ExecutionTrace {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::string> node_names;
  std::vector<TileRef> tiles;
  std::vector<Point> spacetime;
  std::vector<TraceEvent> events;

  /// Header comment line, then seq,worker,node,p...,t...,kind,tile,spins.
  std::string to_csv() const;
};

ExecutionTrace parse_trace_csv(std::string_view text);

enum class TraceViolationKind { DependenceOrder, MissingEvent, EventOrder };

struct TraceViolation {
  TraceViolationKind kind;
  std::string message;
  std::uint64_t consumer_seq = 0;
  std::uint64_t producer_seq = 0;
};

struct TraceReport {
  std::size_t instances = 0;
  std::size_t tiles = 0;
  std::size_t violation_count = 0;
  std::vector<TraceViolation> violations;  // first few
  bool clean() const { return violation_count == 0; }
};

/// Every dependence instance of g between non-input tiles needs the
/// producer's tile_end before the consumer's tile_begin, and each tile's
/// events must appear as acquire_begin, acquire_end, tile_begin, tile_end,
/// update (the acquire and update events only where recorded).
TraceReport verify_trace(const ExecutionTrace& trace, const Prdg& g, std::span<const std::int64_t> s,
                         std::size_t max_reported = 16);

}  // namespace hsd
