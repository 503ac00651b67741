#pragma once

#include "hsd/expr.hpp"
#include "hsd/pipeline.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace hsd::test {

inline Names names(std::vector<std::string> dims, std::vector<std::string> params = {}) {
  return Names{std::move(dims), std::move(params)};
}

inline AffineMap map(const std::vector<std::string>& rows, const Names& n) { return parse_map(rows, n); }

inline Polyhedron poly(std::initializer_list<const char*> rows, const Names& n) {
  Polyhedron p(n.dims.size(), n.params.size());
  for (const char* r : rows)
    for (auto& c : parse_constraint(r, n)) p.add(std::move(c));
  return p;
}

inline Prdg rex_tiled() { return load_prdg(data_path("rex_tiled.prdg.json")); }
inline HsdSchedule rex_schedule(const Prdg& g) { return load_schedule(data_path("rex.sched.json"), g); }

/// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  bool coin() { return range(0, 1) == 1; }
  Point point(std::size_t dim, std::int64_t lo, std::int64_t hi) {
    Point p(dim);
    for (auto& v : p) v = range(lo, hi);
    return p;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace hsd::test
