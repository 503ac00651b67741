#include "hsd/trace.hpp"

#include "hsd/error.hpp"

#include <array>
#include <charconv>
#include <map>
#include <sstream>

namespace hsd {

namespace {

constexpr std::array<std::string_view, 6> kKindNames = {"claim",    "acquire_begin", "acquire_end",
                                                        "tile_begin", "tile_end",    "update"};

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
T number(std::string_view s, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad number '" + std::string(s) + "'", line, 0);
  }
  return v;
}

std::string join_point(const Point& p, char sep) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(p[i]);
  }
  return out;
}

std::string tile_name(const ExecutionTrace& t, std::size_t tile) {
  return t.node_names.at(t.tiles[tile].node) + to_string(t.tiles[tile].coords);
}

}  // namespace

std::string_view to_string(EventKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

EventKind parse_event_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == s) return static_cast<EventKind>(i);
  throw ParseError("unknown event kind '" + std::string(s) + "'");
}

std::string ExecutionTrace::to_csv() const {
  std::ostringstream os;
  os << "# hsd-trace v1 n=" << n << " k=" << k << " nodes=";
  for (std::size_t i = 0; i < node_names.size(); ++i) os << (i ? ";" : "") << node_names[i];
  os << "\nseq,worker,node";
  for (std::size_t i = 0; i < k; ++i) os << ",p" << i;
  for (std::size_t i = k; i < n; ++i) os << ",t" << i - k;
  os << ",kind,tile,spins\n";
  for (const auto& e : events) {
    const auto& tile = tiles.at(e.tile);
    os << e.seq << ',' << e.worker << ',' << node_names.at(tile.node);
    const Point& st = spacetime.at(e.tile);
    for (std::size_t i = 0; i < n; ++i) os << ',' << (i < st.size() ? std::to_string(st[i]) : "");
    os << ',' << to_string(e.kind) << ',' << join_point(tile.coords, ';') << ',' << e.spins << '\n';
  }
  return os.str();
}

ExecutionTrace parse_trace_csv(std::string_view text) {
  ExecutionTrace t;
  auto lines = split(text, '\n');
  if (lines.size() < 2 || !lines[0].starts_with("# hsd-trace v1 ")) throw ParseError("not an hsd trace", 1, 1);
  for (auto field : split(lines[0].substr(15), ' ')) {
    auto eq = field.find('=');
    if (eq == std::string_view::npos) continue;
    auto key = field.substr(0, eq);
    auto value = field.substr(eq + 1);
    if (key == "n") t.n = number<std::size_t>(value, 1);
    if (key == "k") t.k = number<std::size_t>(value, 1);
    if (key == "nodes" && !value.empty())
      for (auto nm : split(value, ';')) t.node_names.emplace_back(nm);
  }
  std::map<std::pair<std::size_t, Point>, std::uint32_t> tile_index;
  for (std::size_t ln = 2; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    auto f = split(lines[ln], ',');
    if (f.size() != t.n + 6) throw ParseError("expected " + std::to_string(t.n + 6) + " fields", ln + 1, 1);
    TraceEvent e;
    e.seq = number<std::uint64_t>(f[0], ln + 1);
    e.worker = number<std::uint32_t>(f[1], ln + 1);
    std::size_t node = t.node_names.size();
    for (std::size_t i = 0; i < t.node_names.size(); ++i)
      if (t.node_names[i] == f[2]) node = i;
    if (node == t.node_names.size()) throw ParseError("unknown node '" + std::string(f[2]) + "'", ln + 1, 1);
    Point st;
    for (std::size_t i = 0; i < t.n; ++i)
      if (!f[3 + i].empty()) st.push_back(number<std::int64_t>(f[3 + i], ln + 1));
    e.kind = parse_event_kind(f[3 + t.n]);
    Point coords;
    if (!f[4 + t.n].empty())
      for (auto c : split(f[4 + t.n], ';')) coords.push_back(number<std::int64_t>(c, ln + 1));
    e.spins = number<std::uint32_t>(f[5 + t.n], ln + 1);
    auto [it, fresh] = tile_index.try_emplace({node, coords}, static_cast<std::uint32_t>(t.tiles.size()));
    if (fresh) {
      t.tiles.push_back({node, std::move(coords)});
      t.spacetime.push_back(std::move(st));
    }
    e.tile = it->second;
    t.events.push_back(e);
  }
  return t;
}

TraceReport verify_trace(const ExecutionTrace& trace, const Prdg& g, std::span<const std::int64_t> s,
                         std::size_t max_reported) {
  TraceReport rep;
  auto report = [&](TraceViolation v) {
    if (rep.violations.size() < max_reported) rep.violations.push_back(std::move(v));
    ++rep.violation_count;
  };

  constexpr std::uint64_t kNone = ~std::uint64_t{0};
  std::vector<std::array<std::uint64_t, 6>> seen(trace.tiles.size());
  for (auto& a : seen) a.fill(kNone);
  for (const auto& e : trace.events) {
    auto& slot = seen.at(e.tile)[static_cast<std::size_t>(e.kind)];
    if (e.kind == EventKind::Claim) {
      if (slot == kNone) slot = e.seq;
      continue;
    }
    if (slot != kNone) {
      report({TraceViolationKind::EventOrder,
              tile_name(trace, e.tile) + ": repeated " + std::string(to_string(e.kind)) + " event", e.seq, slot});
    }
    slot = e.seq;
  }

  // Translate node names of g into trace node indices.
  std::vector<std::size_t> node_map(g.nodes.size(), trace.node_names.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (std::size_t j = 0; j < trace.node_names.size(); ++j)
      if (trace.node_names[j] == g.nodes[i].name) node_map[i] = j;
  std::map<std::pair<std::size_t, Point>, std::size_t> index;
  for (std::size_t i = 0; i < trace.tiles.size(); ++i) index.emplace(std::pair{trace.tiles[i].node, trace.tiles[i].coords}, i);
  auto lookup = [&](std::size_t gnode, const Point& z) {
    auto it = index.find({node_map[gnode], z});
    return it == index.end() ? trace.tiles.size() : it->second;
  };

  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    if (g.nodes[n].is_input) continue;
    for (const auto& z : enumerate_points(g.nodes[n].domain, s)) {
      ++rep.tiles;
      const std::size_t ti = lookup(n, z);
      if (ti == trace.tiles.size() || seen[ti][3] == kNone || seen[ti][4] == kNone) {
        report({TraceViolationKind::MissingEvent, g.nodes[n].name + to_string(z) + " never executed", 0, 0});
        continue;
      }
      const auto& a = seen[ti];
      std::uint64_t last = 0;
      bool first = true;
      for (std::size_t kind = 1; kind < a.size(); ++kind) {
        if (a[kind] == kNone) continue;
        if (!first && a[kind] < last) {
          report({TraceViolationKind::EventOrder,
                  g.nodes[n].name + to_string(z) + ": " + std::string(to_string(static_cast<EventKind>(kind))) +
                      " out of order",
                  a[kind], last});
        }
        last = a[kind];
        first = false;
      }
    }
  }

  for_each_instance(g, s, true, [&](const DependenceInstance& d) {
    ++rep.instances;
    const auto& e = g.edges[d.edge];
    const std::size_t c = lookup(g.node_index(e.src), d.consumer);
    const std::size_t p = lookup(g.node_index(e.pairs[d.pair].dst), d.producer);
    if (c == trace.tiles.size() || p == trace.tiles.size()) return true;  // reported as missing above
    const std::uint64_t begin = seen[c][3];
    const std::uint64_t end = seen[p][4];
    if (begin == kNone || end == kNone) return true;
    if (end >= begin) {
      report({TraceViolationKind::DependenceOrder,
              e.name + ": " + tile_name(trace, c) + " began at seq " + std::to_string(begin) + " before " +
                  tile_name(trace, p) + " ended at seq " + std::to_string(end),
              begin, end});
    }
    return true;
  });
  return rep;
}

}  // namespace hsd
