#pragma once

// Benchmark tile kernels and their whole-program reference evaluations.

#include "hsd/prdg.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsd {

/// Kernel result as raw 64-bit words: integers directly, doubles by bit
/// pattern, so equality is bit-exact.
struct KernelOutput {
  std::string type;  // "u64" or "f64"
  std::vector<std::size_t> shape;
  std::vector<std::uint64_t> words;

  std::uint64_t checksum() const;
  std::string to_csv() const;
  bool operator==(const KernelOutput&) const = default;
};

/// Tile executor.  execute_tile may be called concurrently for distinct
/// tiles once their producers have completed.
class Kernel {
 public:
  virtual ~Kernel() = default;
  /// `node` indexes the tiled PRDG's node list.
  virtual void execute_tile(std::size_t node, std::span<const std::int64_t> tile) = 0;
  virtual KernelOutput output() const = 0;
};

struct Mapping {
  std::string id;
  std::string schedule_file;
  std::string description;
  /// Processor domain extent is linear in the size parameters, so state
  /// entries scale by exactly 2^k when they double.
  bool rectangular_processors;
};

struct BenchmarkInfo {
  std::string id;
  std::size_t dims;
  std::string dependence_pattern;
  std::string prdg_file;
  std::vector<std::string> params;
  Point desk_params;
  std::int64_t min_tile;
  std::vector<Mapping> mappings;
};

const std::vector<BenchmarkInfo>& kernel_catalog();
const BenchmarkInfo& find_benchmark(std::string_view id);
const Mapping& find_mapping(const BenchmarkInfo& b, std::string_view mapping);

/// Absolute path of a shipped fixture file.
std::string data_path(std::string_view file);

struct KernelConfig {
  Point params;         // tile-level size parameters, catalog order
  std::int64_t b = 4;   // tile size, all dimensions
  /// rex2d: "sum" (a + b + 1) or "max"; jacobi: "random" or "constant".
  std::string variant;
  /// Live-in and initial data; 0 gives zeros (integer kernels).
  std::uint64_t seed = 0;
};

std::unique_ptr<Kernel> make_kernel(std::string_view id, const KernelConfig& cfg);
KernelOutput reference_eval(std::string_view id, const KernelConfig& cfg);

/// Point-level dependences of a benchmark kernel projected onto tiles, as
/// (consumer tile, producer tile) pairs with the producer differing from
/// the consumer.  Independent of the tiled fixture; used to check it.
std::vector<std::pair<Point, Point>> projected_tile_dependences(std::string_view id, const KernelConfig& cfg);

/// Kernel for any tiled graph: each tile stores a hash of its coordinates
/// mixed with the values of all its producer tiles.
std::unique_ptr<Kernel> make_hash_kernel(const Prdg& g, std::span<const std::int64_t> s);

}  // namespace hsd
