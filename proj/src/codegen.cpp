#include "hsd/codegen.hpp"

#include "hsd/error.hpp"
#include "hsd/expr.hpp"

#include <cctype>
#include <sstream>

namespace hsd {

namespace {

std::string c_name(std::string_view s) {
  std::string out;
  for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "_" + out;
  return out;
}

std::string node_id(std::string_view node) { return "NODE_" + c_name(node); }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string fold(const std::vector<std::string>& xs, std::string_view fn) {
  std::string out = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) out = std::string(fn) + "(" + xs[i] + ", " + out + ")";
  return out;
}

std::string guard(const Polyhedron& p, const Names& names) {
  auto rows = format_polyhedron(p, names);
  return rows.empty() ? "1" : join(rows, " && ");
}

std::string union_guard(const PolyUnion& u, const Names& names) {
  if (u.pieces().size() == 1) return guard(u.pieces()[0], names);
  std::vector<std::string> parts;
  for (const auto& p : u.pieces()) parts.push_back("(" + guard(p, names) + ")");
  return parts.empty() ? "0" : join(parts, " || ");
}

/// Bounds of dimension `level` of `p` given the outer dimensions.
std::pair<std::string, std::string> level_bounds(const Polyhedron& p, std::size_t level, const Names& all) {
  const Polyhedron q = project_prefix(p, level + 1);
  Names names{std::vector<std::string>(all.dims.begin(), all.dims.begin() + static_cast<std::ptrdiff_t>(level + 1)),
              all.params};
  std::vector<std::string> lower, upper;
  for (const auto& row : q.constraints()) {
    const Int a = row.a[level];
    if (a == 0) continue;
    IntVec ra = row.a;
    ra[level] = 0;
    // a·x + rest >= 0 gives x >= ceil(-rest / a) for a > 0 and
    // x <= floor(rest / -a) for a < 0.
    auto expr = [&](bool negate, const Int& div, bool ceil) {
      IntVec xa = ra, xb = row.b;
      Int xc = row.c;
      if (negate) {
        for (auto& v : xa) v = -v;
        for (auto& v : xb) v = -v;
        xc = -xc;
      }
      const std::string e = format_affine(xa, xb, xc, names);
      if (div == 1) return e;
      return std::string(ceil ? "ceild(" : "floord(") + e + ", " + div.str() + ")";
    };
    const bool eq = row.kind == ConstraintKind::Equality;
    if (a > 0 || eq) {
      const Int d = a > 0 ? a : Int(-a);
      lower.push_back(a > 0 ? expr(true, d, true) : expr(false, d, true));
    }
    if (a < 0 || eq) {
      const Int d = a < 0 ? Int(-a) : a;
      upper.push_back(a < 0 ? expr(false, d, false) : expr(true, d, false));
    }
  }
  if (lower.empty() || upper.empty()) {
    throw UnboundedDomain("loop over " + all.dims[level] + " has no " + (lower.empty() ? "lower" : "upper") + " bound");
  }
  return {fold(lower, "max"), fold(upper, "min")};
}

std::pair<std::string, std::string> union_bounds(const PolyUnion& u, std::size_t level, const Names& all) {
  std::vector<std::string> lo, hi;
  for (const auto& p : u.pieces()) {
    auto [l, h] = level_bounds(p, level, all);
    lo.push_back(l);
    hi.push_back(h);
  }
  if (lo.empty()) throw Error("cannot emit loops over an empty domain");
  return {fold(lo, "min"), fold(hi, "max")};
}

std::string point_args(const std::vector<std::string>& exprs) { return "(" + join(exprs, ", ") + ")"; }

class Emitter {
 public:
  Emitter(const TileProgram& tp, EmitTarget target, std::string_view title)
      : tp_(tp), target_(target), title_(title), names_{tp.dims, tp.params} {
    if (tp.k == 0 || tp.k >= tp.n) throw Error("emission needs at least one processor and one time dimension");
    if (tp.nodes.empty()) throw Error("tile program has no nodes");
  }

  std::string run() {
    header();
    common();
    if (target_ == EmitTarget::Pthreads) pthread_runtime();
    block();
    if (target_ == EmitTarget::Pthreads) {
      pthread_driver();
    } else {
      stub_driver();
    }
    return os_.str();
  }

 private:
  bool pthreads() const { return target_ == EmitTarget::Pthreads; }
  std::string indent(std::size_t depth) const { return std::string(2 * depth, ' '); }

  void header() {
    os_ << "/* " << title_ << ": " << (pthreads() ? "pthreads" : "generic stubs") << ", " << tp_.n
        << " space-time dimensions, " << tp_.k << " processor. */\n";
    for (const auto& node : tp_.nodes) {
      os_ << "/* " << node.name << ": tile " << point_args(format_map(node.to_tile, names_)) << " at "
          << point_args(tp_.dims) << " */\n";
    }
    if (pthreads()) {
      os_ << "/* Link with a definition of hsd_tile(node, p, t); call hsd_run(...). */\n\n";
      os_ << "#include <limits.h>\n#include <pthread.h>\n#include <stdlib.h>\n#include <string.h>\n";
    } else {
      os_ << "/* Define CLAIM(p), ACQUIRE(...), CHECK(node, p, t), TILE(node, p, t) and\n"
             "   UPDATE(node, p, t) before this file; call hsd_program(...). */\n";
    }
    os_ << "\n";
  }

  void common() {
    os_ << "#define ceild(n, d) (((n) < 0) ? -((-(n)) / (d)) : ((n) + (d) - 1) / (d))\n"
           "#define floord(n, d) (((n) < 0) ? -((-(n) + (d) - 1) / (d)) : (n) / (d))\n"
           "#define max(a, b) ((a) > (b) ? (a) : (b))\n"
           "#define min(a, b) ((a) < (b) ? (a) : (b))\n"
           "#define P(...) ((const long[]){__VA_ARGS__})\n"
           "#define T(...) ((const long[]){__VA_ARGS__})\n\n";
    os_ << "#define PROC_DIMS " << tp_.k << "\n#define TIME_DIMS " << tp_.n - tp_.k << "\n";
    os_ << "enum {";
    for (std::size_t i = 0; i < tp_.nodes.size(); ++i) os_ << (i ? ", " : " ") << node_id(tp_.nodes[i].name) << " = " << i;
    os_ << ", NODES = " << tp_.nodes.size() << " };\n\n";
    if (!tp_.params.empty()) {
      std::vector<std::string> ps;
      for (const auto& p : tp_.params) ps.push_back(c_name(p));
      os_ << "static long " << join(ps, ", ") << ";\n\n";
    }
  }

  void pthread_runtime() {
    os_ << "extern void hsd_tile(int node, const long *p, const long *t);\n"
           "#define TILE(node, p, t) hsd_tile(node, p, t)\n\n"
           "static long __lo[PROC_DIMS], __hi[PROC_DIMS];\n"
           "static long *__Queue;\n"
           "static long __nblocks, task_ptr;\n"
           "static long *__STATUS_[NODES];\n"
           "static pthread_mutex_t mutexptr = PTHREAD_MUTEX_INITIALIZER;\n"
           "static pthread_mutex_t mutexsync = PTHREAD_MUTEX_INITIALIZER;\n"
           "static pthread_cond_t sync_cv = PTHREAD_COND_INITIALIZER;\n\n"
           "static long slot_of(const long *p) {\n"
           "  long s = 0;\n"
           "  for (int d = 0; d < PROC_DIMS; d++) s = s * (__hi[d] - __lo[d] + 1) + (p[d] - __lo[d]);\n"
           "  return s;\n"
           "}\n\n"
           "static int reached(int node, const long *p, const long *t) {\n"
           "  const long *cur = __STATUS_[node] + slot_of(p) * TIME_DIMS;\n"
           "  for (int d = 0; d < TIME_DIMS; d++)\n"
           "    if (cur[d] != t[d]) return cur[d] > t[d];\n"
           "  return 1;\n"
           "}\n\n"
           "/* Returns once processor p of node has completed time t. */\n"
           "static void check(int node, const long *p, const long *t) {\n"
           "  int _counter = 0;\n"
           "  pthread_mutex_lock(&mutexsync);\n"
           "  while (!reached(node, p, t)) {\n"
           "    _counter++;\n"
           "    if (_counter > 2) {\n"
           "      pthread_cond_wait(&sync_cv, &mutexsync);\n"
           "    } else {\n"
           "      pthread_mutex_unlock(&mutexsync);\n"
           "      pthread_mutex_lock(&mutexsync);\n"
           "    }\n"
           "  }\n"
           "  pthread_mutex_unlock(&mutexsync);\n"
           "}\n\n"
           "#define acquire(...) ((void)(__VA_ARGS__))\n\n"
           "static void update(int node, const long *p, const long *t) {\n"
           "  pthread_mutex_lock(&mutexsync);\n"
           "  memcpy(__STATUS_[node] + slot_of(p) * TIME_DIMS, t, sizeof(long) * TIME_DIMS);\n"
           "  pthread_cond_broadcast(&sync_cv);\n"
           "  pthread_mutex_unlock(&mutexsync);\n"
           "}\n\n";
  }

  void block() {
    const char* acquire = pthreads() ? "acquire" : "ACQUIRE";
    const char* check = pthreads() ? "check" : "CHECK";
    const char* update = pthreads() ? "update" : "UPDATE";
    os_ << "static void run_block(const long *p) {\n";
    for (std::size_t i = 0; i < tp_.k; ++i) os_ << "  long " << tp_.dims[i] << " = p[" << i << "];\n";
    std::vector<std::string> ts(tp_.dims.begin() + static_cast<std::ptrdiff_t>(tp_.k), tp_.dims.end());
    os_ << "  long " << join(ts, ", ") << ";\n";
    std::size_t depth = 1;
    for (std::size_t level = tp_.k; level < tp_.n; ++level, ++depth) {
      auto [lo, hi] = union_bounds(tp_.update_domain, level, names_);
      const auto& v = tp_.dims[level];
      os_ << indent(depth) << "for (" << v << " = " << lo << "; " << v << " <= " << hi << "; " << v << "++) {\n";
    }
    const std::vector<std::string> ps(tp_.dims.begin(), tp_.dims.begin() + static_cast<std::ptrdiff_t>(tp_.k));
    const std::string here = "P" + point_args(ps) + ", T" + point_args(ts);
    for (const auto& node : tp_.nodes) {
      const std::string id = node_id(node.name);
      os_ << indent(depth) << "if (" << union_guard(node.domain, names_) << ") {\n";
      for (const auto& c : node.clauses) {
        std::vector<std::string> checks;
        for (const auto& t : c.targets) {
          checks.push_back(std::string(check) + "(" + node_id(t.node) + ", P" + point_args(format_map(t.proc, names_)) +
                           ", T" + point_args(format_map(t.time, names_)) + ")");
        }
        os_ << indent(depth + 1) << "if (" << guard(c.domain, names_) << ") " << acquire << "(" << join(checks, ", ")
            << "); /* " << c.edge << " */\n";
      }
      os_ << indent(depth + 1) << "TILE(" << id << ", " << here << ");\n";
      os_ << indent(depth + 1) << update << "(" << id << ", " << here << ");\n";
      os_ << indent(depth) << "}\n";
    }
    for (; depth-- > 1;) os_ << indent(depth) << "}\n";
    os_ << "}\n\n";
  }

  /// Lex-ordered loop over the processors of the update domain.
  void processor_loop(std::string_view visit) {
    PolyUnion procs(tp_.k, tp_.params.size());
    for (const auto& p : tp_.update_domain.pieces()) procs.add(project_prefix(p, tp_.k));
    const std::vector<std::string> ps(tp_.dims.begin(), tp_.dims.begin() + static_cast<std::ptrdiff_t>(tp_.k));
    const Names pnames{ps, tp_.params};
    os_ << "  long " << join(ps, ", ") << ";\n";
    std::size_t depth = 1;
    for (std::size_t level = 0; level < tp_.k; ++level, ++depth) {
      auto [lo, hi] = union_bounds(tp_.update_domain, level, names_);
      const auto& v = ps[level];
      os_ << indent(depth) << "for (" << v << " = " << lo << "; " << v << " <= " << hi << "; " << v << "++) {\n";
    }
    os_ << indent(depth) << "if (" << union_guard(procs, pnames) << ") " << visit << "(P" << point_args(ps) << ");\n";
    for (; depth-- > 1;) os_ << indent(depth) << "}\n";
  }

  std::string param_signature() const {
    std::vector<std::string> out;
    for (const auto& p : tp_.params) out.push_back("long " + c_name(p) + "_");
    return out.empty() ? "void" : join(out, ", ");
  }

  void assign_params() {
    for (const auto& p : tp_.params) os_ << "  " << c_name(p) << " = " << c_name(p) << "_;\n";
  }

  void stub_driver() {
    os_ << "static void claim_and_run(const long *p) {\n"
           "  CLAIM(p);\n"
           "  run_block(p);\n"
           "}\n\n";
    os_ << "void hsd_program(" << param_signature() << ") {\n";
    assign_params();
    processor_loop("claim_and_run");
    os_ << "}\n";
  }

  void pthread_driver() {
    os_ << "static void *Process_block(void *arg) {\n"
           "  long p[PROC_DIMS];\n"
           "  (void)arg;\n"
           "  for (;;) {\n"
           "    /* the queue is in lex order, so this is the smallest unclaimed block */\n"
           "    pthread_mutex_lock(&mutexptr);\n"
           "    if (task_ptr == __nblocks) {\n"
           "      pthread_mutex_unlock(&mutexptr);\n"
           "      return NULL;\n"
           "    }\n"
           "    memcpy(p, __Queue + task_ptr * PROC_DIMS, sizeof p);\n"
           "    task_ptr++;\n"
           "    pthread_mutex_unlock(&mutexptr);\n"
           "    run_block(p);\n"
           "  }\n"
           "}\n\n"
           "static void note_block(const long *p) {\n"
           "  for (int d = 0; d < PROC_DIMS; d++) {\n"
           "    if (p[d] < __lo[d]) __lo[d] = p[d];\n"
           "    if (p[d] > __hi[d]) __hi[d] = p[d];\n"
           "  }\n"
           "  __nblocks++;\n"
           "}\n\n"
           "static void enqueue_block(const long *p) {\n"
           "  memcpy(__Queue + task_ptr * PROC_DIMS, p, sizeof(long) * PROC_DIMS);\n"
           "  task_ptr++;\n"
           "}\n\n"
           "static void for_each_block(void (*visit)(const long *p)) {\n";
    processor_loop("visit");
    os_ << "}\n\n";
    os_ << "int hsd_run(" << param_signature() << (tp_.params.empty() ? "" : ", ") << "int nthreads) {\n";
    assign_params();
    os_ << "  long slots = 1;\n"
           "  pthread_t *threads;\n"
           "  __nblocks = 0;\n"
           "  for (int d = 0; d < PROC_DIMS; d++) {\n"
           "    __lo[d] = LONG_MAX;\n"
           "    __hi[d] = LONG_MIN;\n"
           "  }\n"
           "  for_each_block(note_block);\n"
           "  if (__nblocks == 0) return 0;\n"
           "  __Queue = malloc(sizeof(long) * PROC_DIMS * __nblocks);\n"
           "  task_ptr = 0;\n"
           "  for_each_block(enqueue_block);\n"
           "  task_ptr = 0;\n"
           "  for (int d = 0; d < PROC_DIMS; d++) slots *= __hi[d] - __lo[d] + 1;\n"
           "  for (int n = 0; n < NODES; n++) {\n"
           "    __STATUS_[n] = calloc((size_t)(slots * TIME_DIMS), sizeof(long));\n"
           "    for (long s = 0; s < slots; s++) __STATUS_[n][s * TIME_DIMS] = LONG_MIN;\n"
           "  }\n"
           "  threads = malloc(sizeof(pthread_t) * (size_t)nthreads);\n"
           "  for (int i = 0; i < nthreads; i++) pthread_create(&threads[i], NULL, Process_block, NULL);\n"
           "  for (int i = 0; i < nthreads; i++) pthread_join(threads[i], NULL);\n"
           "  free(threads);\n"
           "  for (int n = 0; n < NODES; n++) free(__STATUS_[n]);\n"
           "  free(__Queue);\n"
           "  return 0;\n"
           "}\n";
  }

  const TileProgram& tp_;
  EmitTarget target_;
  std::string title_;
  Names names_;
  std::ostringstream os_;
};

// ----------------------------------------------------------------- scanner

struct Token {
  std::string text;
  bool ident;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  bool line_start = true;
  while (i < src.size()) {
    const char ch = src[i];
    if (ch == '\n') {
      line_start = true;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (line_start && ch == '#') {
      // Preprocessor line, with continuations.
      while (i < src.size() && !(src[i] == '\n' && src[i - 1] != '\\')) ++i;
      continue;
    }
    line_start = false;
    if (src.substr(i, 2) == "/*") {
      const auto end = src.find("*/", i + 2);
      i = end == std::string_view::npos ? src.size() : end + 2;
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (ch == '"' || ch == '\'') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != ch) j += src[j] == '\\' ? 2 : 1;
      out.push_back({std::string(src.substr(i, j + 1 - i)), false});
      i = j + 1;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({std::string(src.substr(i, j - i)), true});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isalnum(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({std::string(src.substr(i, j - i)), false});
      i = j;
      continue;
    }
    out.push_back({std::string(1, ch), false});
    ++i;
  }
  return out;
}

}  // namespace

EmitTarget parse_emit_target(std::string_view name) {
  if (name == "generic_stubs") return EmitTarget::GenericStubs;
  if (name == "pthreads") return EmitTarget::Pthreads;
  if (name == "cuda" || name == "x10") {
    throw Error("target '" + std::string(name) + "' is documented, not emitted");
  }
  throw Error("unsupported target '" + std::string(name) + "'");
}

std::string_view to_string(EmitTarget t) { return t == EmitTarget::Pthreads ? "pthreads" : "generic_stubs"; }

std::string emit(const TileProgram& tp, EmitTarget target, std::string_view title) {
  return Emitter(tp, target, title).run();
}

SourceStructure scan_structure(std::string_view source) {
  const auto toks = tokenize(source);
  SourceStructure s;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (!toks[i].ident || toks[i + 1].text != "(") continue;
    const std::string& prev = i ? toks[i - 1].text : std::string();
    if (prev == "void" || prev == "int" || prev == "long") continue;  // definition
    const std::string& t = toks[i].text;
    if (t == "pthread_mutex_lock" && i + 4 < toks.size() && toks[i + 2].text == "&" && toks[i + 3].text == "mutexptr") {
      ++s.claim_loops;
    } else if (t == "CLAIM") {
      ++s.claim_loops;
    } else if (t == "acquire" || t == "ACQUIRE") {
      ++s.acquire_sites;
    } else if (t == "check" || t == "CHECK") {
      ++s.check_sites;
    } else if (t == "TILE") {
      ++s.tile_sites;
    } else if (t == "update" || t == "UPDATE") {
      ++s.update_sites;
    }
  }
  return s;
}

}  // namespace hsd
