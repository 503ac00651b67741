#include "hsd/affine.hpp"

#include "hsd/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace hsd {

namespace mp = boost::multiprecision;

std::strong_ordering lex_compare(std::span<const Int> a, std::span<const Int> b) {
  if (a.size() != b.size()) throw DimensionMismatch("lex_compare: vectors of different length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return std::strong_ordering::less;
    if (a[i] > b[i]) return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

std::strong_ordering lex_compare(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.size() != b.size()) throw DimensionMismatch("lex_compare: vectors of different length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] <=> b[i];
  }
  return std::strong_ordering::equal;
}

IntVec to_int_vec(std::span<const std::int64_t> p) { return IntVec(p.begin(), p.end()); }

std::int64_t to_i64(const Int& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw Error("integer value " + v.str() + " does not fit in 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

Point to_point(std::span<const Int> v) {
  Point out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(to_i64(x));
  return out;
}

std::string to_string(std::span<const std::int64_t> p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << ')';
  return os.str();
}

namespace {

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw Error("integer overflow in concrete affine evaluation");
  }
  return static_cast<std::int64_t>(v);
}

Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  Int r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_div64(__int128 a, __int128 b) {
  __int128 q = a / b;
  __int128 r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return narrow(q);
}

std::int64_t ceil_div64(__int128 a, __int128 b) { return narrow(-static_cast<__int128>(floor_div64(-a, b))); }

// Constraint system over m anonymous columns, used for projection and
// emptiness.  Rows are kept normalized: gcd-reduced, integer-tightened, and
// deduplicated.  A violated constant row sets `infeasible` instead of being
// stored.
struct Row {
  IntVec coef;
  Int c;
  bool eq = false;
};

class System {
 public:
  explicit System(std::size_t columns) : m_(columns) {}

  std::size_t columns() const { return m_; }
  bool infeasible() const { return infeasible_; }
  const std::vector<Row>& rows() const { return rows_; }

  void add(Row r) {
    if (infeasible_) return;
    Int g = 0;
    for (const auto& x : r.coef) g = mp::gcd(g, mp::abs(x));
    if (g == 0) {
      const bool holds = r.eq ? r.c == 0 : r.c >= 0;
      if (!holds) infeasible_ = true;
      return;
    }
    if (r.eq) {
      if (r.c % g != 0) {
        infeasible_ = true;
        return;
      }
      for (auto& x : r.coef) x /= g;
      r.c /= g;
      auto first = std::find_if(r.coef.begin(), r.coef.end(), [](const Int& x) { return x != 0; });
      if (*first < 0) {
        for (auto& x : r.coef) x = -x;
        r.c = -r.c;
      }
    } else if (g != 1) {
      for (auto& x : r.coef) x /= g;
      r.c = floor_div(r.c, g);
    }
    rows_.push_back(std::move(r));
  }

  // Deduplicates rows, keeps the tightest inequality per direction, and
  // detects pairs of opposite inequalities with an empty gap.
  void canonicalize() {
    if (infeasible_) return;
    std::map<IntVec, Int> ineq;
    std::map<IntVec, Int> eqs;
    for (auto& r : rows_) {
      if (r.eq) {
        auto [it, inserted] = eqs.emplace(r.coef, r.c);
        if (!inserted && it->second != r.c) {
          infeasible_ = true;
          return;
        }
      } else {
        auto [it, inserted] = ineq.emplace(r.coef, r.c);
        if (!inserted && r.c < it->second) it->second = r.c;
      }
    }
    for (const auto& [coef, c] : ineq) {
      IntVec neg = coef;
      for (auto& x : neg) x = -x;
      auto it = ineq.find(neg);
      if (it != ineq.end() && c + it->second < 0) {
        infeasible_ = true;
        return;
      }
    }
    rows_.clear();
    for (auto& [coef, c] : eqs) rows_.push_back({coef, c, true});
    for (auto& [coef, c] : ineq) rows_.push_back({coef, c, false});
  }

  // Fourier-Motzkin elimination of one column; the column stays in place
  // with all-zero coefficients.
  void eliminate(std::size_t col) {
    if (infeasible_) return;
    std::vector<Row> keep;
    const Row* pivot = nullptr;
    for (const auto& r : rows_) {
      if (r.eq && r.coef[col] != 0 && (!pivot || mp::abs(r.coef[col]) < mp::abs(pivot->coef[col]))) {
        pivot = &r;
      }
    }
    std::vector<Row> old = std::move(rows_);
    rows_.clear();
    if (pivot) {
      const Row e = *pivot;
      const Int a = e.coef[col];
      const Int abs_a = mp::abs(a);
      const int sgn = a > 0 ? 1 : -1;
      bool skipped_pivot = false;
      for (auto& r : old) {
        if (!skipped_pivot && r.eq && r.coef == e.coef && r.c == e.c) {
          skipped_pivot = true;
          continue;
        }
        if (r.coef[col] == 0) {
          add(std::move(r));
          continue;
        }
        const Int rc = r.coef[col];
        Row n{IntVec(m_), 0, r.eq};
        for (std::size_t j = 0; j < m_; ++j) n.coef[j] = abs_a * r.coef[j] - sgn * rc * e.coef[j];
        n.c = abs_a * r.c - sgn * rc * e.c;
        add(std::move(n));
      }
    } else {
      std::vector<const Row*> lower;
      std::vector<const Row*> upper;
      for (const auto& r : old) {
        if (r.coef[col] > 0) {
          lower.push_back(&r);
        } else if (r.coef[col] < 0) {
          upper.push_back(&r);
        } else {
          add(r);
        }
      }
      for (const Row* l : lower) {
        for (const Row* u : upper) {
          const Int lc = l->coef[col];
          const Int uc = -u->coef[col];
          Row n{IntVec(m_), uc * l->c + lc * u->c, false};
          for (std::size_t j = 0; j < m_; ++j) n.coef[j] = uc * l->coef[j] + lc * u->coef[j];
          add(std::move(n));
        }
      }
    }
    canonicalize();
  }

 private:
  std::size_t m_;
  std::vector<Row> rows_;
  bool infeasible_ = false;
};

System symbolic_system(const Polyhedron& p) {
  System sys(p.dim() + p.n_params());
  for (const auto& row : p.constraints()) {
    Row r{IntVec(p.dim() + p.n_params()), row.c, row.kind == ConstraintKind::Equality};
    std::copy(row.a.begin(), row.a.end(), r.coef.begin());
    std::copy(row.b.begin(), row.b.end(), r.coef.begin() + static_cast<std::ptrdiff_t>(p.dim()));
    sys.add(std::move(r));
  }
  sys.canonicalize();
  return sys;
}

System concrete_system(const Polyhedron& p, std::span<const std::int64_t> s) {
  if (s.size() != p.n_params()) throw DimensionMismatch("parameter vector has wrong length");
  System sys(p.dim());
  for (const auto& row : p.constraints()) {
    Row r{row.a, row.c, row.kind == ConstraintKind::Equality};
    for (std::size_t j = 0; j < s.size(); ++j) r.c += row.b[j] * s[j];
    sys.add(std::move(r));
  }
  sys.canonicalize();
  return sys;
}

// Rows of one enumeration level: constraints over dims [0, width).
struct LevelRows {
  std::size_t width = 0;
  std::vector<std::int64_t> coef;
  std::vector<std::int64_t> c;
  std::vector<char> eq;
};

LevelRows to_level(const System& sys, std::size_t width) {
  LevelRows lv;
  lv.width = width;
  for (const auto& r : sys.rows()) {
    for (std::size_t j = 0; j < width; ++j) lv.coef.push_back(to_i64(r.coef[j]));
    lv.c.push_back(to_i64(r.c));
    lv.eq.push_back(r.eq ? 1 : 0);
  }
  return lv;
}

class Walker {
 public:
  Walker(std::vector<LevelRows> levels, const PointVisitor& visit)
      : levels_(std::move(levels)), visit_(visit), z_(levels_.size()) {}

  bool walk(std::size_t d) {
    const auto& lv = levels_[d];
    constexpr auto kNone = std::numeric_limits<std::int64_t>::min();
    std::int64_t lo = kNone;
    std::int64_t hi = std::numeric_limits<std::int64_t>::max();
    bool has_lo = false;
    bool has_hi = false;
    const std::size_t n_rows = lv.c.size();
    for (std::size_t r = 0; r < n_rows; ++r) {
      const std::int64_t* row = lv.coef.data() + r * lv.width;
      __int128 rest = lv.c[r];
      for (std::size_t j = 0; j < d; ++j) rest += static_cast<__int128>(row[j]) * z_[j];
      const std::int64_t a = row[d];
      if (a == 0) {
        if (lv.eq[r] ? rest != 0 : rest < 0) return true;
      } else if (lv.eq[r]) {
        if (rest % a != 0) return true;
        const std::int64_t v = narrow(-rest / a);
        lo = has_lo ? std::max(lo, v) : v;
        hi = has_hi ? std::min(hi, v) : v;
        has_lo = has_hi = true;
      } else if (a > 0) {
        const std::int64_t v = ceil_div64(-rest, a);
        lo = has_lo ? std::max(lo, v) : v;
        has_lo = true;
      } else {
        const std::int64_t v = floor_div64(rest, -static_cast<__int128>(a));
        hi = has_hi ? std::min(hi, v) : v;
        has_hi = true;
      }
    }
    if (!has_lo || !has_hi) {
      throw UnboundedDomain("dimension " + std::to_string(d) + " has no finite " +
                            (has_lo ? "upper" : "lower") + " bound");
    }
    for (std::int64_t v = lo; v <= hi; ++v) {
      z_[d] = v;
      if (d + 1 == levels_.size()) {
        if (!visit_(z_)) return false;
      } else if (!walk(d + 1)) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<LevelRows> levels_;
  const PointVisitor& visit_;
  Point z_;
};

Polyhedron from_system(const System& sys, std::size_t dim, std::size_t n_params) {
  Polyhedron out(dim, n_params);
  if (sys.infeasible()) {
    out.add({IntVec(dim), IntVec(n_params), -1, ConstraintKind::Inequality});
    return out;
  }
  for (const auto& r : sys.rows()) {
    Constraint c;
    c.a.assign(r.coef.begin(), r.coef.begin() + static_cast<std::ptrdiff_t>(dim));
    c.b.assign(r.coef.end() - static_cast<std::ptrdiff_t>(n_params), r.coef.end());
    c.c = r.c;
    c.kind = r.eq ? ConstraintKind::Equality : ConstraintKind::Inequality;
    out.add(std::move(c));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- IntMatrix

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
  IntMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  }
  return out;
}

// Bareiss fraction-free elimination.
Int determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Int sign = 1;
  Int prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(swap, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

// ---------------------------------------------------------------- AffineMap

AffineMap::AffineMap(IntMatrix linear, IntMatrix param, IntVec offset)
    : linear_(std::move(linear)), param_(std::move(param)), offset_(std::move(offset)) {
  if (param_.rows() != linear_.rows() || offset_.size() != linear_.rows()) {
    throw DimensionMismatch("affine map: linear, parameter and offset parts disagree on output dimension");
  }
}

AffineMap AffineMap::identity(std::size_t dim, std::size_t n_params) {
  return AffineMap(IntMatrix::identity(dim), IntMatrix(dim, n_params), IntVec(dim));
}

AffineMap AffineMap::linear_only(IntMatrix linear, std::size_t n_params) {
  const std::size_t rows = linear.rows();
  return AffineMap(std::move(linear), IntMatrix(rows, n_params), IntVec(rows));
}

IntVec AffineMap::apply(std::span<const Int> z, std::span<const Int> s) const {
  if (z.size() != in_dim() || s.size() != n_params()) throw DimensionMismatch("apply: argument dimensions do not match map");
  IntVec out(out_dim());
  for (std::size_t i = 0; i < out_dim(); ++i) {
    Int v = offset_[i];
    for (std::size_t j = 0; j < in_dim(); ++j) v += linear_(i, j) * z[j];
    for (std::size_t j = 0; j < n_params(); ++j) v += param_(i, j) * s[j];
    out[i] = std::move(v);
  }
  return out;
}

Point AffineMap::apply(std::span<const std::int64_t> z, std::span<const std::int64_t> s) const {
  const IntVec zi = to_int_vec(z);
  const IntVec si = to_int_vec(s);
  return to_point(apply(std::span<const Int>(zi), std::span<const Int>(si)));
}

AffineMap AffineMap::slice(std::size_t first, std::size_t count) const {
  if (first + count > out_dim()) throw DimensionMismatch("slice beyond map output");
  IntMatrix a(count, in_dim());
  IntMatrix b(count, n_params());
  IntVec c(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < in_dim(); ++j) a(i, j) = linear_(first + i, j);
    for (std::size_t j = 0; j < n_params(); ++j) b(i, j) = param_(first + i, j);
    c[i] = offset_[first + i];
  }
  return AffineMap(std::move(a), std::move(b), std::move(c));
}

bool AffineMap::is_identity() const {
  return in_dim() == out_dim() && linear_ == IntMatrix::identity(in_dim()) && param_ == IntMatrix(out_dim(), n_params()) &&
         std::all_of(offset_.begin(), offset_.end(), [](const Int& x) { return x == 0; });
}

AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
  if (inner.out_dim() != outer.in_dim()) throw DimensionMismatch("compose: inner output does not feed outer input");
  if (inner.n_params() != outer.n_params()) throw DimensionMismatch("compose: parameter counts differ");
  IntMatrix a = outer.linear() * inner.linear();
  IntMatrix b = outer.linear() * inner.param();
  IntVec c = outer.offset();
  for (std::size_t i = 0; i < outer.out_dim(); ++i) {
    for (std::size_t j = 0; j < outer.n_params(); ++j) b(i, j) += outer.param()(i, j);
    for (std::size_t k = 0; k < outer.in_dim(); ++k) c[i] += outer.linear()(i, k) * inner.offset()[k];
  }
  return AffineMap(std::move(a), std::move(b), std::move(c));
}

AffineMap invert(const AffineMap& f) {
  if (f.in_dim() != f.out_dim()) {
    throw NotInvertible("map is not square (" + std::to_string(f.out_dim()) + "x" + std::to_string(f.in_dim()) + ")", "n/a");
  }
  const Int det = determinant(f.linear());
  if (det != 1 && det != -1) throw NotInvertible("linear part is not unimodular (det = " + det.str() + ")", det.str());

  // Gauss-Jordan over the rationals; unimodularity makes the result integral.
  using Rat = mp::cpp_rational;
  const std::size_t n = f.in_dim();
  std::vector<std::vector<Rat>> m(n, std::vector<Rat>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = Rat(f.linear()(i, j));
    m[i][n + i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (m[piv][col] == 0) ++piv;
    std::swap(m[piv], m[col]);
    const Rat d = m[col][col];
    for (auto& x : m[col]) x /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rat factor = m[r][col];
      for (std::size_t j = 0; j < 2 * n; ++j) m[r][j] -= factor * m[col][j];
    }
  }
  IntMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = mp::numerator(m[i][n + j]);
  }
  // z = inv·(y − B·s − c)
  IntMatrix b = inv * f.param();
  IntVec c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f.n_params(); ++j) b(i, j) = -b(i, j);
    for (std::size_t k = 0; k < n; ++k) c[i] -= inv(i, k) * f.offset()[k];
  }
  return AffineMap(std::move(inv), std::move(b), std::move(c));
}

// --------------------------------------------------------------- Constraint

Int Constraint::evaluate(std::span<const Int> z, std::span<const Int> s) const {
  if (z.size() != a.size() || s.size() != b.size()) throw DimensionMismatch("constraint evaluated at wrong dimension");
  Int v = c;
  for (std::size_t j = 0; j < a.size(); ++j) v += a[j] * z[j];
  for (std::size_t j = 0; j < b.size(); ++j) v += b[j] * s[j];
  return v;
}

bool Constraint::satisfied(std::span<const std::int64_t> z, std::span<const std::int64_t> s) const {
  if (z.size() != a.size() || s.size() != b.size()) throw DimensionMismatch("constraint evaluated at wrong dimension");
  Int v = c;
  for (std::size_t j = 0; j < a.size(); ++j) v += a[j] * z[j];
  for (std::size_t j = 0; j < b.size(); ++j) v += b[j] * s[j];
  return kind == ConstraintKind::Equality ? v == 0 : v >= 0;
}

bool Constraint::is_constant() const {
  return std::all_of(a.begin(), a.end(), [](const Int& x) { return x == 0; }) &&
         std::all_of(b.begin(), b.end(), [](const Int& x) { return x == 0; });
}

bool Constraint::constant_holds() const { return kind == ConstraintKind::Equality ? c == 0 : c >= 0; }

// --------------------------------------------------------------- Polyhedron

void Polyhedron::add(Constraint row) {
  if (row.a.size() != dim_ || row.b.size() != n_params_) throw DimensionMismatch("constraint width does not match polyhedron");
  if (std::find(rows_.begin(), rows_.end(), row) != rows_.end()) return;
  rows_.push_back(std::move(row));
}

Polyhedron Polyhedron::intersect(const Polyhedron& other) const {
  if (other.dim_ != dim_ || other.n_params_ != n_params_) throw DimensionMismatch("intersect: shapes differ");
  Polyhedron out = *this;
  for (const auto& r : other.rows_) out.add(r);
  return out;
}

Polyhedron Polyhedron::preimage(const AffineMap& f) const {
  if (f.out_dim() != dim_ || f.n_params() != n_params_) throw DimensionMismatch("preimage: map does not land in this space");
  Polyhedron out(f.in_dim(), n_params_);
  for (const auto& r : rows_) {
    Constraint n;
    n.kind = r.kind;
    n.a.assign(f.in_dim(), 0);
    n.b = r.b;
    n.c = r.c;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (r.a[i] == 0) continue;
      for (std::size_t j = 0; j < f.in_dim(); ++j) n.a[j] += r.a[i] * f.linear()(i, j);
      for (std::size_t j = 0; j < n_params_; ++j) n.b[j] += r.a[i] * f.param()(i, j);
      n.c += r.a[i] * f.offset()[i];
    }
    out.add(std::move(n));
  }
  return out;
}

Polyhedron Polyhedron::simplified() const {
  Polyhedron out(dim_, n_params_);
  for (const auto& r : rows_) {
    if (r.is_constant() && r.constant_holds()) continue;
    out.add(r);
  }
  return out;
}

bool Polyhedron::trivially_empty() const {
  return std::any_of(rows_.begin(), rows_.end(), [](const Constraint& r) { return r.is_constant() && !r.constant_holds(); });
}

bool Polyhedron::contains(std::span<const std::int64_t> z, std::span<const std::int64_t> s) const {
  return std::all_of(rows_.begin(), rows_.end(), [&](const Constraint& r) { return r.satisfied(z, s); });
}

// ---------------------------------------------------------------- PolyUnion

PolyUnion::PolyUnion(Polyhedron single) : dim_(single.dim()), n_params_(single.n_params()) {
  pieces_.push_back(std::move(single));
}

void PolyUnion::add(Polyhedron piece) {
  if (piece.dim() != dim_ || piece.n_params() != n_params_) throw DimensionMismatch("union piece shape differs");
  pieces_.push_back(std::move(piece));
}

PolyUnion PolyUnion::preimage(const AffineMap& f) const {
  PolyUnion out(f.in_dim(), n_params_);
  for (const auto& p : pieces_) out.add(p.preimage(f));
  return out;
}

PolyUnion PolyUnion::intersect(const Polyhedron& p) const {
  PolyUnion out(dim_, n_params_);
  for (const auto& piece : pieces_) out.add(piece.intersect(p));
  return out;
}

bool PolyUnion::contains(std::span<const std::int64_t> z, std::span<const std::int64_t> s) const {
  return std::any_of(pieces_.begin(), pieces_.end(), [&](const Polyhedron& p) { return p.contains(z, s); });
}

// ------------------------------------------------------------- enumeration

ParamBox ParamBox::fixed(std::span<const std::int64_t> s) { return {Point(s.begin(), s.end()), Point(s.begin(), s.end())}; }

void for_each_point(const Polyhedron& p, std::span<const std::int64_t> s, const PointVisitor& visit) {
  System sys = concrete_system(p, s);
  if (sys.infeasible()) return;
  const std::size_t n = p.dim();
  if (n == 0) {
    visit(Point{});
    return;
  }
  std::vector<LevelRows> levels(n);
  for (std::size_t d = n; d-- > 0;) {
    levels[d] = to_level(sys, d + 1);
    sys.eliminate(d);
    if (sys.infeasible()) return;
  }
  Walker(std::move(levels), visit).walk(0);
}

std::vector<Point> enumerate_points(const Polyhedron& p, std::span<const std::int64_t> s) {
  std::vector<Point> out;
  for_each_point(p, s, [&](std::span<const std::int64_t> z) {
    out.emplace_back(z.begin(), z.end());
    return true;
  });
  return out;
}

std::vector<Point> enumerate_points(const PolyUnion& p, std::span<const std::int64_t> s) {
  std::vector<Point> out;
  for (const auto& piece : p.pieces()) {
    auto pts = enumerate_points(piece, s);
    out.insert(out.end(), std::make_move_iterator(pts.begin()), std::make_move_iterator(pts.end()));
  }
  if (p.pieces().size() > 1) {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

std::vector<IntVec> enumerate(const Polyhedron& p, std::span<const std::int64_t> s) {
  std::vector<IntVec> out;
  for_each_point(p, s, [&](std::span<const std::int64_t> z) {
    out.push_back(to_int_vec(z));
    return true;
  });
  return out;
}

namespace {

std::optional<Point> find_point(const Polyhedron& p, std::span<const std::int64_t> s) {
  std::optional<Point> found;
  for_each_point(p, s, [&](std::span<const std::int64_t> z) {
    found = Point(z.begin(), z.end());
    return false;
  });
  return found;
}

// Polyhedron over (z, s) with the parameter box as extra rows.
Polyhedron lift_params(const Polyhedron& p, const ParamBox& box) {
  const std::size_t n = p.dim() + p.n_params();
  Polyhedron out(n, 0);
  for (const auto& r : p.constraints()) {
    Constraint c;
    c.a = r.a;
    c.a.insert(c.a.end(), r.b.begin(), r.b.end());
    c.c = r.c;
    c.kind = r.kind;
    out.add(std::move(c));
  }
  for (std::size_t j = 0; j < p.n_params(); ++j) {
    Constraint lo{IntVec(n), {}, -Int(box.lo[j])};
    lo.a[p.dim() + j] = 1;
    Constraint hi{IntVec(n), {}, Int(box.hi[j])};
    hi.a[p.dim() + j] = -1;
    out.add(std::move(lo));
    out.add(std::move(hi));
  }
  return out;
}

}  // namespace

EmptinessResult is_empty(const Polyhedron& p, const std::optional<ParamBox>& params) {
  if (p.trivially_empty()) return {Emptiness::Empty, {}, {}};
  if (params) {
    if (params->lo.size() != p.n_params() || params->hi.size() != p.n_params()) {
      throw DimensionMismatch("parameter box has wrong dimension");
    }
    try {
      if (params->is_fixed()) {
        if (auto w = find_point(p, params->lo)) return {Emptiness::NonEmpty, *w, params->lo};
        return {Emptiness::Empty, {}, {}};
      }
      if (auto w = find_point(lift_params(p, *params), Point{})) {
        Point z(w->begin(), w->begin() + static_cast<std::ptrdiff_t>(p.dim()));
        Point s(w->begin() + static_cast<std::ptrdiff_t>(p.dim()), w->end());
        return {Emptiness::NonEmpty, std::move(z), std::move(s)};
      }
      return {Emptiness::Empty, {}, {}};
    } catch (const UnboundedDomain&) {
      return {Emptiness::Unknown, {}, {}};
    }
  }

  System sys = symbolic_system(p);
  for (std::size_t col = 0; col < sys.columns() && !sys.infeasible(); ++col) sys.eliminate(col);
  if (sys.infeasible()) return {Emptiness::Empty, {}, {}};

  // Rationally feasible: look for an integer witness at small parameter values.
  constexpr std::int64_t kRadius = 8;
  std::vector<std::int64_t> order;
  for (std::int64_t v = 1; v <= kRadius; ++v) order.push_back(v);
  order.push_back(0);
  for (std::int64_t v = 1; v <= kRadius; ++v) order.push_back(-v);
  const std::size_t np = p.n_params();
  std::vector<std::size_t> idx(np, 0);
  while (true) {
    Point s(np);
    for (std::size_t j = 0; j < np; ++j) s[j] = order[idx[j]];
    try {
      if (auto w = find_point(p, s)) return {Emptiness::NonEmpty, *w, s};
    } catch (const UnboundedDomain&) {
    }
    std::size_t j = 0;
    while (j < np && ++idx[j] == order.size()) idx[j++] = 0;
    if (j == np) break;
  }
  return {Emptiness::Unknown, {}, {}};
}

EmptinessResult is_empty(const PolyUnion& p, const std::optional<ParamBox>& params) {
  bool unknown = false;
  for (const auto& piece : p.pieces()) {
    auto r = is_empty(piece, params);
    if (r.status == Emptiness::NonEmpty) return r;
    if (r.status == Emptiness::Unknown) unknown = true;
  }
  return {unknown ? Emptiness::Unknown : Emptiness::Empty, {}, {}};
}

PolyUnion neq_set(const AffineMap& f, const AffineMap& g, const Polyhedron& d) {
  if (f.in_dim() != d.dim() || g.in_dim() != d.dim() || f.out_dim() != g.out_dim() || f.n_params() != d.n_params() ||
      g.n_params() != d.n_params()) {
    throw DimensionMismatch("neq_set: maps and domain disagree on dimensions");
  }
  const std::size_t n = d.dim();
  const std::size_t np = d.n_params();
  auto diff_row = [&](std::size_t i, int sign, const Int& shift, ConstraintKind kind) {
    Constraint c{IntVec(n), IntVec(np), sign * (f.offset()[i] - g.offset()[i]) + shift, kind};
    for (std::size_t j = 0; j < n; ++j) c.a[j] = sign * (f.linear()(i, j) - g.linear()(i, j));
    for (std::size_t j = 0; j < np; ++j) c.b[j] = sign * (f.param()(i, j) - g.param()(i, j));
    return c;
  };
  PolyUnion out(n, np);
  Polyhedron base = d;
  for (std::size_t i = 0; i < f.out_dim(); ++i) {
    for (int sign : {1, -1}) {
      Polyhedron piece = base;
      piece.add(diff_row(i, sign, -1, ConstraintKind::Inequality));
      piece = piece.simplified();
      if (!piece.trivially_empty()) out.add(std::move(piece));
    }
    base.add(diff_row(i, 1, 0, ConstraintKind::Equality));
    base = base.simplified();
    if (base.trivially_empty()) break;
  }
  return out;
}

Polyhedron project_prefix(const Polyhedron& p, std::size_t keep) {
  if (keep > p.dim()) throw DimensionMismatch("project_prefix: keep exceeds dimension");
  System sys = symbolic_system(p);
  for (std::size_t col = p.dim(); col-- > keep;) sys.eliminate(col);
  System reduced(keep + p.n_params());
  if (sys.infeasible()) {
    reduced.add({IntVec(keep + p.n_params()), -1, false});
  } else {
    for (const auto& r : sys.rows()) {
      Row n{IntVec(), r.c, r.eq};
      n.coef.assign(r.coef.begin(), r.coef.begin() + static_cast<std::ptrdiff_t>(keep));
      n.coef.insert(n.coef.end(), r.coef.begin() + static_cast<std::ptrdiff_t>(p.dim()), r.coef.end());
      reduced.add(std::move(n));
    }
  }
  reduced.canonicalize();
  return from_system(reduced, keep, p.n_params());
}

// --------------------------------------------------------- concrete forms

ConcretePolyhedron::ConcretePolyhedron(const Polyhedron& p, std::span<const std::int64_t> s) : dim_(p.dim()) {
  if (s.size() != p.n_params()) throw DimensionMismatch("parameter vector has wrong length");
  for (const auto& r : p.constraints()) {
    for (const auto& x : r.a) coef_.push_back(to_i64(x));
    Int c = r.c;
    for (std::size_t j = 0; j < s.size(); ++j) c += r.b[j] * s[j];
    constant_.push_back(to_i64(c));
    equality_.push_back(r.kind == ConstraintKind::Equality ? 1 : 0);
  }
}

bool ConcretePolyhedron::contains(std::span<const std::int64_t> z) const {
  if (z.size() != dim_) throw DimensionMismatch("point has wrong dimension");
  for (std::size_t r = 0; r < constant_.size(); ++r) {
    __int128 v = constant_[r];
    const std::int64_t* row = coef_.data() + r * dim_;
    for (std::size_t j = 0; j < dim_; ++j) v += static_cast<__int128>(row[j]) * z[j];
    if (equality_[r] ? v != 0 : v < 0) return false;
  }
  return true;
}

ConcreteAffineMap::ConcreteAffineMap(const AffineMap& f, std::span<const std::int64_t> s)
    : in_(f.in_dim()), out_(f.out_dim()) {
  if (s.size() != f.n_params()) throw DimensionMismatch("parameter vector has wrong length");
  for (std::size_t i = 0; i < out_; ++i) {
    for (std::size_t j = 0; j < in_; ++j) coef_.push_back(to_i64(f.linear()(i, j)));
    Int c = f.offset()[i];
    for (std::size_t j = 0; j < s.size(); ++j) c += f.param()(i, j) * s[j];
    constant_.push_back(to_i64(c));
  }
}

void ConcreteAffineMap::apply(std::span<const std::int64_t> z, std::span<std::int64_t> out) const {
  if (z.size() != in_ || out.size() != out_) throw DimensionMismatch("apply: argument dimensions do not match map");
  for (std::size_t i = 0; i < out_; ++i) {
    __int128 v = constant_[i];
    const std::int64_t* row = coef_.data() + i * in_;
    for (std::size_t j = 0; j < in_; ++j) v += static_cast<__int128>(row[j]) * z[j];
    out[i] = narrow(v);
  }
}

Point ConcreteAffineMap::apply(std::span<const std::int64_t> z) const {
  Point out(out_);
  apply(z, out);
  return out;
}

}  // namespace hsd
