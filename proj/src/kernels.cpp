#include "hsd/kernels.hpp"

#include "hsd/error.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

#ifndef HSD_DATA_DIR
#define HSD_DATA_DIR "data"
#endif

namespace hsd {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix(h ^ (v + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2))); }

std::uint64_t point_hash(std::uint64_t seed, std::initializer_list<std::int64_t> coords) {
  std::uint64_t h = splitmix(seed);
  for (auto c : coords) h = mix(h, static_cast<std::uint64_t>(c));
  return h;
}

double unit_value(std::uint64_t seed, std::int64_t a, std::int64_t b = 0) {
  return static_cast<double>(point_hash(seed, {a, b}) >> 11) * 0x1.0p-53;
}

std::uint64_t bits(double d) { return std::bit_cast<std::uint64_t>(d); }

std::int64_t param(const KernelConfig& cfg, std::size_t i, std::size_t expected) {
  if (cfg.params.size() != expected) throw DimensionMismatch("kernel: wrong number of size parameters");
  if (cfg.params[i] < 0) throw Error("kernel: size parameters must be nonnegative");
  return cfg.params[i];
}

void require_tile(const KernelConfig& cfg, std::int64_t min) {
  if (cfg.b < min) throw Error("kernel: tile size must be at least " + std::to_string(min));
}

// ------------------------------------------------------------------- rex2d
// H[i][j] = foo(H[i-1][j], H[i][j-1]) on 1..M × 1..N, live-in row/column 0.
// M = (M_b + 1)·b − 1, so tile indices ⌊i/b⌋ run over 0..M_b.

struct Rex2dShape {
  std::int64_t m, n, b;
  bool use_max;
  std::uint64_t seed;
  explicit Rex2dShape(const KernelConfig& cfg)
      : m((param(cfg, 0, 2) + 1) * cfg.b - 1),
        n((param(cfg, 1, 2) + 1) * cfg.b - 1),
        b(cfg.b),
        use_max(cfg.variant == "max"),
        seed(cfg.seed) {
    require_tile(cfg, 1);
    if (!cfg.variant.empty() && cfg.variant != "sum" && cfg.variant != "max") {
      throw Error("rex2d: unknown variant '" + cfg.variant + "'");
    }
  }
  std::uint64_t foo(std::uint64_t a, std::uint64_t c) const { return use_max ? std::max(a, c) : a + c + 1; }
  std::uint64_t live_in(std::int64_t i, std::int64_t j) const { return seed ? point_hash(seed, {i, j}) : 0; }
  std::size_t at(std::int64_t i, std::int64_t j) const { return static_cast<std::size_t>(i * (n + 1) + j); }
  std::vector<std::uint64_t> initial() const {
    std::vector<std::uint64_t> h(static_cast<std::size_t>((m + 1) * (n + 1)));
    for (std::int64_t i = 0; i <= m; ++i) h[at(i, 0)] = live_in(i, 0);
    for (std::int64_t j = 0; j <= n; ++j) h[at(0, j)] = live_in(0, j);
    return h;
  }
  KernelOutput output(const std::vector<std::uint64_t>& h) const {
    KernelOutput out{"u64", {static_cast<std::size_t>(m), static_cast<std::size_t>(n)}, {}};
    for (std::int64_t i = 1; i <= m; ++i)
      for (std::int64_t j = 1; j <= n; ++j) out.words.push_back(h[at(i, j)]);
    return out;
  }
};

class Rex2dKernel : public Kernel {
 public:
  explicit Rex2dKernel(const KernelConfig& cfg) : sh_(cfg), h_(sh_.initial()) {}
  void execute_tile(std::size_t, std::span<const std::int64_t> tile) override {
    const std::int64_t b = sh_.b;
    for (std::int64_t i = std::max<std::int64_t>(1, tile[0] * b); i <= std::min(sh_.m, tile[0] * b + b - 1); ++i)
      for (std::int64_t j = std::max<std::int64_t>(1, tile[1] * b); j <= std::min(sh_.n, tile[1] * b + b - 1); ++j)
        h_[sh_.at(i, j)] = sh_.foo(h_[sh_.at(i - 1, j)], h_[sh_.at(i, j - 1)]);
  }
  KernelOutput output() const override { return sh_.output(h_); }

 private:
  Rex2dShape sh_;
  std::vector<std::uint64_t> h_;
};

KernelOutput rex2d_reference(const KernelConfig& cfg) {
  const Rex2dShape sh(cfg);
  auto h = sh.initial();
  for (std::int64_t i = 1; i <= sh.m; ++i)
    for (std::int64_t j = 1; j <= sh.n; ++j) h[sh.at(i, j)] = sh.foo(h[sh.at(i - 1, j)], h[sh.at(i, j - 1)]);
  return sh.output(h);
}

// ------------------------------------------------------------------- rex3d
// H[i][j][k] = H[i-1][j][k] + H[i][j-1][k] + H[i][j][k-1] + 1 on 1..N per
// dimension, N = N_b·b; tile index ⌊(x − 1)/b⌋.

struct Rex3dShape {
  std::int64_t n, b;
  std::uint64_t seed;
  explicit Rex3dShape(const KernelConfig& cfg) : n(param(cfg, 0, 1) * cfg.b), b(cfg.b), seed(cfg.seed) {
    require_tile(cfg, 1);
  }
  std::size_t at(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return static_cast<std::size_t>((i * (n + 1) + j) * (n + 1) + k);
  }
  std::vector<std::uint64_t> initial() const {
    std::vector<std::uint64_t> h(static_cast<std::size_t>((n + 1) * (n + 1) * (n + 1)));
    if (seed) {
      for (std::int64_t i = 0; i <= n; ++i)
        for (std::int64_t j = 0; j <= n; ++j)
          for (std::int64_t k = 0; k <= n; ++k)
            if (i == 0 || j == 0 || k == 0) h[at(i, j, k)] = point_hash(seed, {i, j, k});
    }
    return h;
  }
  void point(std::vector<std::uint64_t>& h, std::int64_t i, std::int64_t j, std::int64_t k) const {
    h[at(i, j, k)] = h[at(i - 1, j, k)] + h[at(i, j - 1, k)] + h[at(i, j, k - 1)] + 1;
  }
  KernelOutput output(const std::vector<std::uint64_t>& h) const {
    const auto un = static_cast<std::size_t>(n);
    KernelOutput out{"u64", {un, un, un}, {}};
    for (std::int64_t i = 1; i <= n; ++i)
      for (std::int64_t j = 1; j <= n; ++j)
        for (std::int64_t k = 1; k <= n; ++k) out.words.push_back(h[at(i, j, k)]);
    return out;
  }
};

class Rex3dKernel : public Kernel {
 public:
  explicit Rex3dKernel(const KernelConfig& cfg) : sh_(cfg), h_(sh_.initial()) {}
  void execute_tile(std::size_t, std::span<const std::int64_t> tile) override {
    const std::int64_t b = sh_.b;
    for (std::int64_t i = tile[0] * b + 1; i <= tile[0] * b + b; ++i)
      for (std::int64_t j = tile[1] * b + 1; j <= tile[1] * b + b; ++j)
        for (std::int64_t k = tile[2] * b + 1; k <= tile[2] * b + b; ++k) sh_.point(h_, i, j, k);
  }
  KernelOutput output() const override { return sh_.output(h_); }

 private:
  Rex3dShape sh_;
  std::vector<std::uint64_t> h_;
};

KernelOutput rex3d_reference(const KernelConfig& cfg) {
  const Rex3dShape sh(cfg);
  auto h = sh.initial();
  for (std::int64_t i = 1; i <= sh.n; ++i)
    for (std::int64_t j = 1; j <= sh.n; ++j)
      for (std::int64_t k = 1; k <= sh.n; ++k) sh.point(h, i, j, k);
  return sh.output(h);
}

// -------------------------------------------------------------------- ltmi
// Lower-triangular in-place pattern on {0 <= j <= i < N, 0 <= k < N}:
// X = X[i-1,j,k] + 2·X[i,j-1,k] + 3·X[i,j,k-1] + 1, reads outside the
// domain take live-in values.

struct LtmiShape {
  std::int64_t n, b;
  std::uint64_t seed;
  explicit LtmiShape(const KernelConfig& cfg) : n(param(cfg, 0, 1) * cfg.b), b(cfg.b), seed(cfg.seed) {
    require_tile(cfg, 1);
  }
  std::size_t at(std::int64_t i, std::int64_t j, std::int64_t k) const { return static_cast<std::size_t>((i * n + j) * n + k); }
  bool inside(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return 0 <= j && j <= i && i < n && 0 <= k && k < n;
  }
  std::uint64_t read(const std::vector<std::uint64_t>& x, std::int64_t i, std::int64_t j, std::int64_t k) const {
    if (inside(i, j, k)) return x[at(i, j, k)];
    return seed ? point_hash(seed, {i, j, k}) : 0;
  }
  void point(std::vector<std::uint64_t>& x, std::int64_t i, std::int64_t j, std::int64_t k) const {
    x[at(i, j, k)] = read(x, i - 1, j, k) + 2 * read(x, i, j - 1, k) + 3 * read(x, i, j, k - 1) + 1;
  }
  KernelOutput output(const std::vector<std::uint64_t>& x) const {
    KernelOutput out{"u64", {0}, {}};
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j <= i; ++j)
        for (std::int64_t k = 0; k < n; ++k) out.words.push_back(x[at(i, j, k)]);
    out.shape[0] = out.words.size();
    return out;
  }
};

class LtmiKernel : public Kernel {
 public:
  explicit LtmiKernel(const KernelConfig& cfg) : sh_(cfg), x_(static_cast<std::size_t>(sh_.n * sh_.n * sh_.n)) {}
  void execute_tile(std::size_t, std::span<const std::int64_t> tile) override {
    const std::int64_t b = sh_.b;
    for (std::int64_t i = tile[0] * b; i < tile[0] * b + b; ++i)
      for (std::int64_t j = tile[1] * b; j <= std::min(i, tile[1] * b + b - 1); ++j)
        for (std::int64_t k = tile[2] * b; k < tile[2] * b + b; ++k) sh_.point(x_, i, j, k);
  }
  KernelOutput output() const override { return sh_.output(x_); }

 private:
  LtmiShape sh_;
  std::vector<std::uint64_t> x_;
};

KernelOutput ltmi_reference(const KernelConfig& cfg) {
  const LtmiShape sh(cfg);
  std::vector<std::uint64_t> x(static_cast<std::size_t>(sh.n * sh.n * sh.n));
  for (std::int64_t i = 0; i < sh.n; ++i)
    for (std::int64_t j = 0; j <= i; ++j)
      for (std::int64_t k = 0; k < sh.n; ++k) sh.point(x, i, j, k);
  return sh.output(x);
}

// ------------------------------------------------------------------ jacobi
// Point (t, x) computes step t+1 from step t, 0 <= t < T, 1 <= x_d <= N,
// fixed boundary.  Tiles are cubes over (t, t + x_1, ...), T = T_b·b and
// N = (N_b − 1)·b.

struct JacobiShape {
  std::size_t d;
  std::int64_t t_steps, n, b, w;
  std::vector<double> a;  // (T + 1) × (N + 2)^d

  JacobiShape(const KernelConfig& cfg, std::size_t dims)
      : d(dims), t_steps(param(cfg, 0, 2) * cfg.b), n((param(cfg, 1, 2) - 1) * cfg.b), b(cfg.b), w(n + 2) {
    require_tile(cfg, 3);
    if (cfg.params[1] < 2) throw Error("jacobi: N_b must be at least 2");
    if (!cfg.variant.empty() && cfg.variant != "random" && cfg.variant != "constant") {
      throw Error("jacobi: unknown variant '" + cfg.variant + "'");
    }
    const std::size_t plane = d == 1 ? static_cast<std::size_t>(w) : static_cast<std::size_t>(w * w);
    a.assign(plane * static_cast<std::size_t>(t_steps + 1), 0.0);
    const bool constant = cfg.variant == "constant";
    for (std::int64_t x = 0; x < w; ++x) {
      for (std::int64_t y = 0; y < (d == 1 ? 1 : w); ++y) {
        const double v = constant ? 1.0 : unit_value(cfg.seed, x, y);
        const bool edge = x == 0 || x == w - 1 || (d == 2 && (y == 0 || y == w - 1));
        for (std::int64_t t = 0; t <= t_steps; ++t) {
          if (t == 0 || edge) a[idx(t, x, y)] = v;
        }
      }
    }
  }
  std::size_t idx(std::int64_t t, std::int64_t x, std::int64_t y = 0) const {
    return d == 1 ? static_cast<std::size_t>(t * w + x) : static_cast<std::size_t>((t * w + x) * w + y);
  }
  void point1(std::int64_t t, std::int64_t i) {
    a[idx(t + 1, i)] = 0.5 * a[idx(t, i)] + 0.25 * (a[idx(t, i - 1)] + a[idx(t, i + 1)]);
  }
  void point2(std::int64_t t, std::int64_t i, std::int64_t j) {
    a[idx(t + 1, i, j)] = 0.5 * a[idx(t, i, j)] +
                          0.125 * ((a[idx(t, i - 1, j)] + a[idx(t, i + 1, j)]) + (a[idx(t, i, j - 1)] + a[idx(t, i, j + 1)]));
  }
  KernelOutput output() const {
    KernelOutput out{"f64", {}, {}};
    if (d == 1) {
      out.shape = {static_cast<std::size_t>(w)};
      for (std::int64_t x = 0; x < w; ++x) out.words.push_back(bits(a[idx(t_steps, x)]));
    } else {
      out.shape = {static_cast<std::size_t>(w), static_cast<std::size_t>(w)};
      for (std::int64_t x = 0; x < w; ++x)
        for (std::int64_t y = 0; y < w; ++y) out.words.push_back(bits(a[idx(t_steps, x, y)]));
    }
    return out;
  }
};

class JacobiKernel : public Kernel {
 public:
  JacobiKernel(const KernelConfig& cfg, std::size_t d) : sh_(cfg, d) {}
  void execute_tile(std::size_t, std::span<const std::int64_t> tile) override {
    const std::int64_t b = sh_.b;
    const std::int64_t t_hi = std::min(sh_.t_steps - 1, tile[0] * b + b - 1);
    for (std::int64_t t = tile[0] * b; t <= t_hi; ++t) {
      const std::int64_t i_lo = std::max<std::int64_t>(1, tile[1] * b - t);
      const std::int64_t i_hi = std::min(sh_.n, tile[1] * b + b - 1 - t);
      if (sh_.d == 1) {
        for (std::int64_t i = i_lo; i <= i_hi; ++i) sh_.point1(t, i);
        continue;
      }
      const std::int64_t j_lo = std::max<std::int64_t>(1, tile[2] * b - t);
      const std::int64_t j_hi = std::min(sh_.n, tile[2] * b + b - 1 - t);
      for (std::int64_t i = i_lo; i <= i_hi; ++i)
        for (std::int64_t j = j_lo; j <= j_hi; ++j) sh_.point2(t, i, j);
    }
  }
  KernelOutput output() const override { return sh_.output(); }

 private:
  JacobiShape sh_;
};

KernelOutput jacobi_reference(const KernelConfig& cfg, std::size_t d) {
  JacobiShape sh(cfg, d);
  for (std::int64_t t = 0; t < sh.t_steps; ++t) {
    for (std::int64_t i = 1; i <= sh.n; ++i) {
      if (d == 1) {
        sh.point1(t, i);
      } else {
        for (std::int64_t j = 1; j <= sh.n; ++j) sh.point2(t, i, j);
      }
    }
  }
  return sh.output();
}

// ------------------------------------------------------------- hash kernel

class HashKernel : public Kernel {
 public:
  HashKernel(const Prdg& g, std::span<const std::int64_t> s) : g_(g) {
    index_.resize(g.nodes.size());
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
      if (g.nodes[n].is_input) continue;
      for (auto& z : enumerate_points(g.nodes[n].domain, s)) index_[n].emplace(std::move(z), tiles_.size() + index_[n].size());
      const std::size_t base = tiles_.size();
      tiles_.resize(base + index_[n].size());
      for (const auto& [z, i] : index_[n]) {
        tiles_[i].node = n;
        tiles_[i].coords = z;
      }
    }
    values_ = std::vector<std::atomic<std::uint64_t>>(tiles_.size());
    for_each_instance(g, s, true, [&](const DependenceInstance& d) {
      const auto& e = g.edges[d.edge];
      const std::size_t src = g.node_index(e.src);
      const std::size_t dst = g.node_index(e.pairs[d.pair].dst);
      auto ci = index_[src].find(d.consumer);
      auto pi = index_[dst].find(d.producer);
      if (ci == index_[src].end() || pi == index_[dst].end()) {
        throw Error("hash kernel: dependence instance outside the node domains");
      }
      tiles_[ci->second].producers.push_back(pi->second);
      return true;
    });
    for (auto& t : tiles_) {
      std::sort(t.producers.begin(), t.producers.end());
      t.producers.erase(std::unique(t.producers.begin(), t.producers.end()), t.producers.end());
    }
  }

  void execute_tile(std::size_t node, std::span<const std::int64_t> tile) override {
    auto it = index_.at(node).find(Point(tile.begin(), tile.end()));
    if (it == index_[node].end()) throw Error("hash kernel: tile " + to_string(tile) + " is not in the domain");
    const Tile& t = tiles_[it->second];
    std::uint64_t h = splitmix(node + 1);
    for (auto c : tile) h = mix(h, static_cast<std::uint64_t>(c));
    for (std::size_t p : t.producers) h = mix(h, values_[p].load(std::memory_order_relaxed));
    values_[it->second].store(h, std::memory_order_relaxed);
  }

  KernelOutput output() const override {
    KernelOutput out{"u64", {tiles_.size()}, {}};
    for (const auto& v : values_) out.words.push_back(v.load(std::memory_order_relaxed));
    return out;
  }

 private:
  struct Tile {
    std::size_t node = 0;
    Point coords;
    std::vector<std::size_t> producers;
  };
  const Prdg& g_;
  std::vector<std::map<Point, std::size_t>> index_;
  std::vector<Tile> tiles_;
  std::vector<std::atomic<std::uint64_t>> values_;
};

}  // namespace

// -------------------------------------------------------------------- public

std::uint64_t KernelOutput::checksum() const {
  std::uint64_t h = splitmix(words.size());
  for (auto w : words) h = mix(h, w);
  return h;
}

std::string KernelOutput::to_csv() const {
  std::ostringstream os;
  os << "# type=" << type << " shape=";
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << "\n";
  const std::size_t row = shape.empty() ? words.size() : shape.back();
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (type == "f64") {
      os.precision(17);
      os << std::bit_cast<double>(words[i]);
    } else {
      os << words[i];
    }
    os << (row && (i + 1) % row == 0 ? "\n" : ",");
  }
  return os.str();
}

const std::vector<BenchmarkInfo>& kernel_catalog() {
  static const std::vector<BenchmarkInfo> catalog = {
      {"rex2d", 2, "(i-1,j), (i,j-1)", "rex_tiled.prdg.json", {"M_b", "N_b"}, {63, 63}, 1,
       {{"m1", "rex.sched.json", "(i,j) -> (i; j)", false}}},
      {"rex3d", 3, "(i-1,j,k), (i,j-1,k), (i,j,k-1)", "rex3d.prdg.json", {"N_b"}, {8}, 1,
       {{"m1", "rex3d_m1.sched.json", "(i,j,k) -> (i; j,k)", true},
        {"m2", "rex3d_m2.sched.json", "(i,j,k) -> (i,j; k)", true}}},
      {"jacobi1d", 2, "3-point stencil over time", "jacobi1d.prdg.json", {"T_b", "N_b"}, {64, 256}, 3,
       {{"m1", "jacobi1d.sched.json", "(t,i) -> (t; 2t+i)", true}}},
      {"jacobi2d", 3, "5-point stencil over time", "jacobi2d.prdg.json", {"T_b", "N_b"}, {16, 32}, 3,
       {{"m1", "jacobi2d_m1.sched.json", "(t,i,j) -> (t; 2t+i, 2t+j)", true},
        {"m2", "jacobi2d_m2.sched.json", "(t,i,j) -> (t, 2t+i; 2t+j)", true}}},
      {"ltmi", 3, "(i-1,j,k), (i,j-1,k), (i,j,k-1) on j <= i", "ltmi.prdg.json", {"N_b"}, {8}, 1,
       {{"m1", "ltmi.sched.json", "(i,j,k) -> (i; j,k)", true}}},
  };
  return catalog;
}

const BenchmarkInfo& find_benchmark(std::string_view id) {
  for (const auto& b : kernel_catalog())
    if (b.id == id) return b;
  throw ResolutionError("unknown benchmark '" + std::string(id) + "'", std::string(id));
}

const Mapping& find_mapping(const BenchmarkInfo& b, std::string_view mapping) {
  for (const auto& m : b.mappings)
    if (m.id == mapping) return m;
  throw ResolutionError("benchmark " + b.id + " has no mapping '" + std::string(mapping) + "'", std::string(mapping));
}

std::string data_path(std::string_view file) { return std::string(HSD_DATA_DIR) + "/" + std::string(file); }

std::unique_ptr<Kernel> make_kernel(std::string_view id, const KernelConfig& cfg) {
  if (id == "rex2d") return std::make_unique<Rex2dKernel>(cfg);
  if (id == "rex3d") return std::make_unique<Rex3dKernel>(cfg);
  if (id == "ltmi") return std::make_unique<LtmiKernel>(cfg);
  if (id == "jacobi1d") return std::make_unique<JacobiKernel>(cfg, 1);
  if (id == "jacobi2d") return std::make_unique<JacobiKernel>(cfg, 2);
  throw ResolutionError("unknown benchmark '" + std::string(id) + "'", std::string(id));
}

KernelOutput reference_eval(std::string_view id, const KernelConfig& cfg) {
  if (id == "rex2d") return rex2d_reference(cfg);
  if (id == "rex3d") return rex3d_reference(cfg);
  if (id == "ltmi") return ltmi_reference(cfg);
  if (id == "jacobi1d") return jacobi_reference(cfg, 1);
  if (id == "jacobi2d") return jacobi_reference(cfg, 2);
  throw ResolutionError("unknown benchmark '" + std::string(id) + "'", std::string(id));
}

std::vector<std::pair<Point, Point>> projected_tile_dependences(std::string_view id, const KernelConfig& cfg) {
  std::set<std::pair<Point, Point>> deps;
  auto add = [&](Point c, Point p) {
    if (c != p) deps.emplace(std::move(c), std::move(p));
  };
  auto fl = [](std::int64_t a, std::int64_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
  const std::int64_t b = cfg.b;
  if (id == "rex2d") {
    const Rex2dShape sh(cfg);
    for (std::int64_t i = 1; i <= sh.m; ++i)
      for (std::int64_t j = 1; j <= sh.n; ++j) {
        if (i > 1) add({i / b, j / b}, {(i - 1) / b, j / b});
        if (j > 1) add({i / b, j / b}, {i / b, (j - 1) / b});
      }
  } else if (id == "rex3d") {
    const Rex3dShape sh(cfg);
    auto t = [&](std::int64_t x) { return (x - 1) / b; };
    for (std::int64_t i = 1; i <= sh.n; ++i)
      for (std::int64_t j = 1; j <= sh.n; ++j)
        for (std::int64_t k = 1; k <= sh.n; ++k) {
          const Point c{t(i), t(j), t(k)};
          if (i > 1) add(c, {t(i - 1), t(j), t(k)});
          if (j > 1) add(c, {t(i), t(j - 1), t(k)});
          if (k > 1) add(c, {t(i), t(j), t(k - 1)});
        }
  } else if (id == "ltmi") {
    const LtmiShape sh(cfg);
    for (std::int64_t i = 0; i < sh.n; ++i)
      for (std::int64_t j = 0; j <= i; ++j)
        for (std::int64_t k = 0; k < sh.n; ++k) {
          const Point c{i / b, j / b, k / b};
          if (sh.inside(i - 1, j, k)) add(c, {(i - 1) / b, j / b, k / b});
          if (sh.inside(i, j - 1, k)) add(c, {i / b, (j - 1) / b, k / b});
          if (sh.inside(i, j, k - 1)) add(c, {i / b, j / b, (k - 1) / b});
        }
  } else if (id == "jacobi1d" || id == "jacobi2d") {
    const std::size_t d = id == "jacobi1d" ? 1 : 2;
    const std::int64_t t_steps = param(cfg, 0, 2) * b;
    const std::int64_t n = (param(cfg, 1, 2) - 1) * b;
    for (std::int64_t t = 0; t < t_steps; ++t)
      for (std::int64_t i = 1; i <= n; ++i)
        for (std::int64_t j = 1; j <= (d == 1 ? 1 : n); ++j) {
          auto tile = [&](std::int64_t tt, std::int64_t ii, std::int64_t jj) {
            Point p{fl(tt, b), fl(tt + ii, b)};
            if (d == 2) p.push_back(fl(tt + jj, b));
            return p;
          };
          if (t == 0) continue;
          const Point c = tile(t, i, j);
          std::vector<std::pair<std::int64_t, std::int64_t>> nb{{i, j}, {i - 1, j}, {i + 1, j}};
          if (d == 2) {
            nb.emplace_back(i, j - 1);
            nb.emplace_back(i, j + 1);
          }
          for (auto [ii, jj] : nb) {
            if (ii < 1 || ii > n || (d == 2 && (jj < 1 || jj > n))) continue;
            add(c, tile(t - 1, ii, jj));
          }
        }
  } else {
    throw ResolutionError("unknown benchmark '" + std::string(id) + "'", std::string(id));
  }
  return {deps.begin(), deps.end()};
}

std::unique_ptr<Kernel> make_hash_kernel(const Prdg& g, std::span<const std::int64_t> s) {
  return std::make_unique<HashKernel>(g, s);
}

}  // namespace hsd
