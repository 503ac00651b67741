#include "support.hpp"

#include "hsd/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace hsd;
using namespace hsd::test;

TEST_CASE("lexicographic comparison") {
  CHECK(lex_compare(Point{2, 5}, Point{2, 5}) == std::strong_ordering::equal);
  CHECK(lex_compare(Point{1, 9}, Point{2, 0}) == std::strong_ordering::less);
  CHECK(lex_compare(Point{3, 1, 7}, Point{3, 1, 6}) == std::strong_ordering::greater);
  CHECK(lex_compare(Point{}, Point{}) == std::strong_ordering::equal);
}

TEST_CASE("applying dependence and schedule maps") {
  const Names ij = names({"i", "j"});
  CHECK(map({"i - 1", "j"}, ij).apply(Point{2, 1}, Point{}) == Point{1, 1});

  const Names ti = names({"t", "i"});
  const AffineMap skew = map({"t", "2*t + i"}, ti);
  CHECK(skew.apply(Point{3, 5}, Point{}) == Point{3, 11});

  const Names sized = names({"i"}, {"M"});
  CHECK(map({"i + M - 1"}, sized).apply(Point{3}, Point{10}) == Point{12});
}

TEST_CASE("inverse of the skewed mapping") {
  const AffineMap skew = map({"t", "2*t + i"}, names({"t", "i"}));
  const AffineMap inv = invert(skew);
  CHECK(inv == map({"u", "v - 2*u"}, names({"u", "v"})));

  for (std::int64_t t = 0; t < 8; ++t)
    for (std::int64_t i = 0; i < 8; ++i) CHECK(inv.apply(skew.apply(Point{t, i}, Point{}), Point{}) == Point{t, i});

  Gen gen(7);
  const AffineMap both = compose(skew, inv);
  CHECK(both.is_identity());
  for (int r = 0; r < 100; ++r) {
    const Point z = gen.point(2, -50, 50);
    CHECK(both.apply(z, Point{}) == z);
  }
}

TEST_CASE("non-unimodular maps are rejected") {
  const AffineMap twice = map({"2*i"}, names({"i"}));
  try {
    invert(twice);
    FAIL("expected NotInvertible");
  } catch (const NotInvertible& e) {
    CHECK(e.determinant() == "2");
  }
  CHECK_THROWS_AS(invert(map({"i + j", "i + j"}, names({"i", "j"}))), NotInvertible);
  CHECK_THROWS_AS(invert(map({"i"}, names({"i", "j"}))), Error);
}

TEST_CASE("inverse keeps parameter and offset parts") {
  const Names n = names({"i", "j"}, {"N"});
  const AffineMap f = map({"j + N", "i - j + 3"}, n);
  const AffineMap g = invert(f);
  Gen gen(3);
  for (int r = 0; r < 50; ++r) {
    const Point z = gen.point(2, -20, 20);
    const Point s = gen.point(1, 0, 9);
    CHECK(g.apply(f.apply(z, s), s) == z);
  }
}

TEST_CASE("determinant") {
  IntMatrix m(3, 3);
  const int v[3][3] = {{2, 0, 1}, {1, 3, 2}, {1, 1, 2}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = v[r][c];
  CHECK(determinant(m) == Int(6));
  CHECK(determinant(IntMatrix::identity(4)) == Int(1));
  CHECK(determinant(IntMatrix(0, 0)) == Int(1));
}

TEST_CASE("composition agrees with pointwise application") {
  Gen gen(11);
  const Names n = names({"a", "b", "c"}, {"P"});
  for (int r = 0; r < 40; ++r) {
    auto coef = [&] { return std::to_string(gen.range(-3, 3)); };
    auto row = [&] { return coef() + "*a + " + coef() + "*b + " + coef() + "*c + " + coef() + "*P + " + coef(); };
    const AffineMap f = map({row(), row(), row()}, n);
    const AffineMap g = map({row(), row(), row()}, n);
    const AffineMap fg = compose(f, g);
    for (int q = 0; q < 10; ++q) {
      const Point z = gen.point(3, -10, 10);
      const Point s = gen.point(1, -5, 5);
      CHECK(fg.apply(z, s) == f.apply(g.apply(z, s), s));
    }
  }
}

TEST_CASE("node domain enumeration") {
  const Names n = names({"i", "j"}, {"M", "N"});
  const Polyhedron d = poly({"1 <= i <= M", "1 <= j <= N"}, n);
  const auto pts = enumerate_points(d, Point{2, 2});
  CHECK(pts == std::vector<Point>{{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  CHECK(enumerate_points(d, Point{0, 5}).empty());
  CHECK_THROWS_AS(enumerate_points(poly({"i >= 0", "j >= 0"}, n), Point{2, 2}), UnboundedDomain);
}

TEST_CASE("points are visited in lex order exactly once") {
  Gen gen(5);
  const Names n = names({"x", "y", "z"});
  for (int r = 0; r < 60; ++r) {
    Polyhedron p = poly({"-4 <= x <= 4", "-4 <= y <= 4", "-4 <= z <= 4"}, n);
    for (int extra = 0; extra < 2; ++extra) {
      const std::string row = std::to_string(gen.range(-2, 2)) + "*x + " + std::to_string(gen.range(-2, 2)) + "*y + " +
                              std::to_string(gen.range(-2, 2)) + "*z + " + std::to_string(gen.range(-3, 6)) +
                              (gen.coin() ? " >= 0" : " == 0");
      for (auto& c : parse_constraint(row, n)) p.add(c);
    }
    std::vector<Point> brute;
    for (std::int64_t x = -4; x <= 4; ++x)
      for (std::int64_t y = -4; y <= 4; ++y)
        for (std::int64_t z = -4; z <= 4; ++z)
          if (p.contains(Point{x, y, z}, Point{})) brute.push_back({x, y, z});
    CHECK(enumerate_points(p, Point{}) == brute);

    const auto e = is_empty(p, ParamBox::fixed(Point{}));
    CHECK((e.status == Emptiness::Empty) == brute.empty());
    if (e.status == Emptiness::NonEmpty) CHECK(p.contains(e.witness, Point{}));
  }
}

TEST_CASE("projection keeps every integer shadow point") {
  Gen gen(9);
  const Names n = names({"x", "y", "z"});
  for (int r = 0; r < 60; ++r) {
    Polyhedron p = poly({"0 <= x <= 6", "0 <= y <= 6", "0 <= z <= 6"}, n);
    for (int extra = 0; extra < 3; ++extra) {
      const std::string row = std::to_string(gen.range(-3, 3)) + "*x + " + std::to_string(gen.range(-3, 3)) + "*y + " +
                              std::to_string(gen.range(-3, 3)) + "*z + " + std::to_string(gen.range(0, 12)) + " >= 0";
      for (auto& c : parse_constraint(row, n)) p.add(c);
    }
    const Polyhedron shadow = project_prefix(p, 1);
    REQUIRE(shadow.dim() == 1);
    std::set<std::int64_t> xs;
    for (const auto& q : enumerate_points(p, Point{})) xs.insert(q[0]);
    for (auto x : xs) CHECK(shadow.contains(Point{x}, Point{}));
  }
  // Exact on boxes.
  const Polyhedron box = poly({"1 <= x <= 3", "2 <= y <= 5", "z == x + y"}, n);
  CHECK(enumerate_points(project_prefix(box, 2), Point{}).size() == 12);
}

TEST_CASE("symbolic emptiness of a residual domain") {
  const Names n = names({"i_b", "j_b"}, {"M_b", "N_b"});
  const Polyhedron e1 = poly({"0 <= i_b <= M_b", "0 <= j_b <= N_b", "i_b > 0", "j_b > 0"}, n);
  CHECK(is_empty(e1, ParamBox::fixed(Point{4, 4})).status == Emptiness::NonEmpty);
  CHECK(is_empty(e1, ParamBox::fixed(Point{0, 4})).status == Emptiness::Empty);
  CHECK(is_empty(e1).status == Emptiness::NonEmpty);
  CHECK(is_empty(poly({"i_b >= 1", "i_b <= 0"}, n)).status == Emptiness::Empty);
}

TEST_CASE("disequality set") {
  const Names n = names({"i", "j"});
  const PolyUnion neq = neq_set(map({"i + j"}, n), map({"2*i"}, n), poly({"0 <= i <= 3", "0 <= j <= 3"}, n));
  std::vector<Point> want;
  for (std::int64_t i = 0; i <= 3; ++i)
    for (std::int64_t j = 0; j <= 3; ++j)
      if (i != j) want.push_back({i, j});
  CHECK(enumerate_points(neq, Point{}) == want);
  CHECK(want.size() == 12);

  // Pieces are disjoint.
  std::size_t total = 0;
  for (const auto& piece : neq.pieces()) total += enumerate_points(piece, Point{}).size();
  CHECK(total == 12);
}

TEST_CASE("disequality set against brute force") {
  Gen gen(21);
  const Names n = names({"i", "j"});
  const Polyhedron d = poly({"-3 <= i <= 3", "-3 <= j <= 3"}, n);
  for (int r = 0; r < 50; ++r) {
    auto row = [&] {
      return std::to_string(gen.range(-2, 2)) + "*i + " + std::to_string(gen.range(-2, 2)) + "*j + " +
             std::to_string(gen.range(-2, 2));
    };
    const AffineMap f = map({row(), row()}, n);
    const AffineMap g = map({row(), row()}, n);
    const PolyUnion u = neq_set(f, g, d);
    std::size_t total = 0;
    for (const auto& piece : u.pieces()) total += enumerate_points(piece, Point{}).size();
    std::size_t want = 0;
    for (const auto& z : enumerate_points(d, Point{})) want += f.apply(z, Point{}) != g.apply(z, Point{}) ? 1 : 0;
    CHECK(total == want);
    CHECK(enumerate_points(u, Point{}).size() == want);
  }
}

TEST_CASE("concrete forms agree with symbolic ones") {
  Gen gen(2);
  const Names n = names({"i", "j"}, {"N"});
  const Polyhedron p = poly({"0 <= i <= N", "i <= j + 1", "2*j <= N + 3"}, n);
  const AffineMap f = map({"i + N", "j - 2*i + 1"}, n);
  for (std::int64_t s = 0; s < 6; ++s) {
    const ConcretePolyhedron cp(p, Point{s});
    const ConcreteAffineMap cf(f, Point{s});
    for (int r = 0; r < 50; ++r) {
      const Point z = gen.point(2, -3, 8);
      CHECK(cp.contains(z) == p.contains(z, Point{s}));
      CHECK(cf.apply(z) == f.apply(z, Point{s}));
    }
  }
}

TEST_CASE("64-bit overflow is reported") {
  const AffineMap big = map({"9223372036854775807 + i"}, names({"i"}));
  CHECK_THROWS_AS(big.apply(Point{1}, Point{}), Error);
}
