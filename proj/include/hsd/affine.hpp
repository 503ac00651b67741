#pragma once

// Exact integer affine algebra and the polyhedral set operations the rest of
// the library is built on.  Symbolic objects (maps, constraint rows) carry
// arbitrary-precision coefficients; concrete enumeration runs on 64-bit
// points and raises an Error instead of wrapping when a value does not fit.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hsd {

using Int = boost::multiprecision::cpp_int;
using IntVec = std::vector<Int>;
using Point = std::vector<std::int64_t>;

std::strong_ordering lex_compare(std::span<const Int> a, std::span<const Int> b);
std::strong_ordering lex_compare(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

IntVec to_int_vec(std::span<const std::int64_t> p);
std::int64_t to_i64(const Int& v);
Point to_point(std::span<const Int> v);
std::string to_string(std::span<const std::int64_t> p);

/// Dense row-major integer matrix.  Shapes with zero rows keep their column
/// count, so a map into a 0-dimensional space still knows its input width.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Int& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Int& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool operator==(const IntMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Int> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
Int determinant(const IntMatrix& m);

/// F(z, s) = A·z + B·s + c over iteration indices z and size parameters s.
class AffineMap {
 public:
  AffineMap() = default;
  AffineMap(IntMatrix linear, IntMatrix param, IntVec offset);
  static AffineMap identity(std::size_t dim, std::size_t n_params);
  /// Map with the given linear part, zero parameter part and zero offset.
  static AffineMap linear_only(IntMatrix linear, std::size_t n_params);

  std::size_t in_dim() const { return linear_.cols(); }
  std::size_t out_dim() const { return linear_.rows(); }
  std::size_t n_params() const { return param_.cols(); }
  const IntMatrix& linear() const { return linear_; }
  const IntMatrix& param() const { return param_; }
  const IntVec& offset() const { return offset_; }

  IntVec apply(std::span<const Int> z, std::span<const Int> s) const;
  Point apply(std::span<const std::int64_t> z, std::span<const std::int64_t> s) const;

  /// Rows [first, first + count) as a map of their own (used for pi / tau).
  AffineMap slice(std::size_t first, std::size_t count) const;
  bool is_identity() const;

  bool operator==(const AffineMap&) const = default;

 private:
  IntMatrix linear_;
  IntMatrix param_;
  IntVec offset_;
};

/// outer ∘ inner: z ↦ outer(inner(z, s), s).
AffineMap compose(const AffineMap& outer, const AffineMap& inner);
/// Inverse of a map whose linear part is unimodular; NotInvertible otherwise.
AffineMap invert(const AffineMap& f);

enum class ConstraintKind { Inequality, Equality };

/// a·z + b·s + c >= 0 (Inequality) or == 0 (Equality).
struct Constraint {
  IntVec a;
  IntVec b;
  Int c;
  ConstraintKind kind = ConstraintKind::Inequality;

  Int evaluate(std::span<const Int> z, std::span<const Int> s) const;
  bool satisfied(std::span<const std::int64_t> z, std::span<const std::int64_t> s) const;
  bool is_constant() const;
  /// For a constant row: whether it holds.
  bool constant_holds() const;

  bool operator==(const Constraint&) const = default;
};

class Polyhedron {
 public:
  Polyhedron() = default;
  Polyhedron(std::size_t dim, std::size_t n_params) : dim_(dim), n_params_(n_params) {}

  std::size_t dim() const { return dim_; }
  std::size_t n_params() const { return n_params_; }
  const std::vector<Constraint>& constraints() const { return rows_; }

  /// Appends a row unless an identical row is already present.
  void add(Constraint row);
  Polyhedron intersect(const Polyhedron& other) const;
  /// {z | f(z, s) ∈ this}.
  Polyhedron preimage(const AffineMap& f) const;
  /// Drops rows that hold identically.
  Polyhedron simplified() const;
  /// True when some constant row is violated.
  bool trivially_empty() const;
  bool contains(std::span<const std::int64_t> z, std::span<const std::int64_t> s) const;

  bool operator==(const Polyhedron&) const = default;

 private:
  std::size_t dim_ = 0;
  std::size_t n_params_ = 0;
  std::vector<Constraint> rows_;
};

/// Union of polyhedra of equal shape; pieces may overlap.
class PolyUnion {
 public:
  PolyUnion() = default;
  PolyUnion(std::size_t dim, std::size_t n_params) : dim_(dim), n_params_(n_params) {}
  explicit PolyUnion(Polyhedron single);

  std::size_t dim() const { return dim_; }
  std::size_t n_params() const { return n_params_; }
  const std::vector<Polyhedron>& pieces() const { return pieces_; }
  bool empty_syntactically() const { return pieces_.empty(); }

  void add(Polyhedron piece);
  PolyUnion preimage(const AffineMap& f) const;
  PolyUnion intersect(const Polyhedron& p) const;
  bool contains(std::span<const std::int64_t> z, std::span<const std::int64_t> s) const;

  bool operator==(const PolyUnion&) const = default;

 private:
  std::size_t dim_ = 0;
  std::size_t n_params_ = 0;
  std::vector<Polyhedron> pieces_;
};

/// Inclusive box on the size parameters.
struct ParamBox {
  Point lo;
  Point hi;
  static ParamBox fixed(std::span<const std::int64_t> s);
  bool is_fixed() const { return lo == hi; }
};

enum class Emptiness { Empty, NonEmpty, Unknown };

struct EmptinessResult {
  Emptiness status = Emptiness::Unknown;
  Point witness;
  Point params;
};

/// With a parameter box the answer is exact (bounded enumeration).  Without
/// one, rational infeasibility gives Empty, a found integer point gives
/// NonEmpty, and anything else is Unknown.
EmptinessResult is_empty(const Polyhedron& p, const std::optional<ParamBox>& params = std::nullopt);
EmptinessResult is_empty(const PolyUnion& p, const std::optional<ParamBox>& params = std::nullopt);

/// Visitor returns false to stop the walk early.
using PointVisitor = std::function<bool(std::span<const std::int64_t>)>;

/// Visits every integer point in lexicographic order, exactly once.
/// Throws UnboundedDomain if some dimension has no finite bound.
void for_each_point(const Polyhedron& p, std::span<const std::int64_t> s, const PointVisitor& visit);
std::vector<Point> enumerate_points(const Polyhedron& p, std::span<const std::int64_t> s);
/// Union enumeration: sorted, duplicates removed.
std::vector<Point> enumerate_points(const PolyUnion& p, std::span<const std::int64_t> s);
std::vector<IntVec> enumerate(const Polyhedron& p, std::span<const std::int64_t> s);

/// {z ∈ d | f(z) ≠ g(z)} as disjoint pieces split on the first differing output.
PolyUnion neq_set(const AffineMap& f, const AffineMap& g, const Polyhedron& d);

/// Fourier-Motzkin shadow of p on its first `keep` dimensions (parameters kept).
/// Rows are tightened to integer bounds, so every integer point of p projects
/// into the result.
Polyhedron project_prefix(const Polyhedron& p, std::size_t keep);

/// Polyhedron with parameters substituted, for hot-path membership tests.
class ConcretePolyhedron {
 public:
  ConcretePolyhedron() = default;
  ConcretePolyhedron(const Polyhedron& p, std::span<const std::int64_t> s);
  std::size_t dim() const { return dim_; }
  bool contains(std::span<const std::int64_t> z) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::int64_t> coef_;
  std::vector<std::int64_t> constant_;
  std::vector<char> equality_;
};

/// Affine map with parameters folded into the offset.
class ConcreteAffineMap {
 public:
  ConcreteAffineMap() = default;
  ConcreteAffineMap(const AffineMap& f, std::span<const std::int64_t> s);
  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }
  void apply(std::span<const std::int64_t> z, std::span<std::int64_t> out) const;
  Point apply(std::span<const std::int64_t> z) const;

 private:
  std::size_t in_ = 0;
  std::size_t out_ = 0;
  std::vector<std::int64_t> coef_;
  std::vector<std::int64_t> constant_;
};

}  // namespace hsd
