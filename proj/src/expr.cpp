#include "hsd/expr.hpp"

#include "hsd/error.hpp"

#include <cctype>
#include <optional>

namespace hsd {

namespace {

struct Token {
  enum Kind { Number, Ident, Op, End } kind;
  std::string text;
  int column;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char ch = s[i];
    const int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Token::Number, std::string(s.substr(i, j - i)), col});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) ++j;
      out.push_back({Token::Ident, std::string(s.substr(i, j - i)), col});
      i = j;
    } else if ((ch == '>' || ch == '<' || ch == '=') && i + 1 < s.size() && s[i + 1] == '=') {
      out.push_back({Token::Op, std::string(s.substr(i, 2)), col});
      i += 2;
    } else if (std::string_view("+-*()<>=").find(ch) != std::string_view::npos) {
      out.push_back({Token::Op, std::string(1, ch), col});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + ch + "' at column " + std::to_string(col), 0, col);
    }
  }
  out.push_back({Token::End, "", static_cast<int>(s.size()) + 1});
  return out;
}

bool is_comparison(const Token& t) {
  return t.kind == Token::Op && (t.text == ">=" || t.text == "<=" || t.text == "==" || t.text == "=" || t.text == ">" ||
                                 t.text == "<");
}

class Parser {
 public:
  Parser(std::string_view text, const Names& names) : tokens_(tokenize(text)), names_(names) {}

  LinearExpr expression() {
    LinearExpr acc = term();
    while (peek().kind == Token::Op && (peek().text == "+" || peek().text == "-")) {
      const bool minus = next().text == "-";
      LinearExpr rhs = term();
      add_scaled(acc, rhs, minus ? -1 : 1);
    }
    return acc;
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& what, const Token& at) const {
    throw ParseError(what + " at column " + std::to_string(at.column), 0, at.column);
  }

  void expect_end() {
    if (peek().kind != Token::End) fail("unexpected '" + peek().text + "'", peek());
  }

 private:
  LinearExpr zero() const { return {IntVec(names_.dims.size()), IntVec(names_.params.size()), 0}; }

  static bool constant(const LinearExpr& e) {
    for (const auto& x : e.a)
      if (x != 0) return false;
    for (const auto& x : e.b)
      if (x != 0) return false;
    return true;
  }

  static void add_scaled(LinearExpr& acc, const LinearExpr& rhs, const Int& k) {
    for (std::size_t j = 0; j < acc.a.size(); ++j) acc.a[j] += k * rhs.a[j];
    for (std::size_t j = 0; j < acc.b.size(); ++j) acc.b[j] += k * rhs.b[j];
    acc.c += k * rhs.c;
  }

  LinearExpr term() {
    LinearExpr acc = unary();
    while (peek().kind == Token::Op && peek().text == "*") {
      const Token& star = next();
      LinearExpr rhs = unary();
      if (constant(rhs)) {
        scale(acc, rhs.c);
      } else if (constant(acc)) {
        scale(rhs, acc.c);
        acc = std::move(rhs);
      } else {
        fail("product of two non-constant terms is not affine", star);
      }
    }
    return acc;
  }

  static void scale(LinearExpr& e, const Int& k) {
    for (auto& x : e.a) x *= k;
    for (auto& x : e.b) x *= k;
    e.c *= k;
  }

  LinearExpr unary() {
    if (peek().kind == Token::Op && peek().text == "-") {
      next();
      LinearExpr e = unary();
      scale(e, -1);
      return e;
    }
    if (peek().kind == Token::Op && peek().text == "+") {
      next();
      return unary();
    }
    return primary();
  }

  LinearExpr primary() {
    const Token& t = next();
    LinearExpr e = zero();
    switch (t.kind) {
      case Token::Number:
        e.c = Int(t.text);
        return e;
      case Token::Ident:
        for (std::size_t j = 0; j < names_.dims.size(); ++j) {
          if (names_.dims[j] == t.text) {
            e.a[j] = 1;
            return e;
          }
        }
        for (std::size_t j = 0; j < names_.params.size(); ++j) {
          if (names_.params[j] == t.text) {
            e.b[j] = 1;
            return e;
          }
        }
        throw ResolutionError("unknown identifier '" + t.text + "' at column " + std::to_string(t.column), t.text);
      case Token::Op:
        if (t.text == "(") {
          e = expression();
          if (peek().kind != Token::Op || peek().text != ")") fail("expected ')'", peek());
          next();
          return e;
        }
        fail("unexpected '" + t.text + "'", t);
      case Token::End:
        fail("unexpected end of expression", t);
    }
    fail("unreachable", t);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Names& names_;
};

Constraint make_row(const LinearExpr& lhs, const LinearExpr& rhs, int sign, const Int& shift, ConstraintKind kind) {
  Constraint row{IntVec(lhs.a.size()), IntVec(lhs.b.size()), sign * (lhs.c - rhs.c) + shift, kind};
  for (std::size_t j = 0; j < row.a.size(); ++j) row.a[j] = sign * (lhs.a[j] - rhs.a[j]);
  for (std::size_t j = 0; j < row.b.size(); ++j) row.b[j] = sign * (lhs.b[j] - rhs.b[j]);
  return row;
}

void append_term(std::string& out, const Int& coef, const std::string& name) {
  if (coef == 0) return;
  const Int mag = coef < 0 ? Int(-coef) : coef;
  if (out.empty()) {
    if (coef < 0) out += "-";
  } else {
    out += coef < 0 ? " - " : " + ";
  }
  if (name.empty()) {
    out += mag.str();
  } else {
    if (mag != 1) out += mag.str() + "*";
    out += name;
  }
}

}  // namespace

LinearExpr parse_affine(std::string_view text, const Names& names) {
  Parser p(text, names);
  LinearExpr e = p.expression();
  p.expect_end();
  return e;
}

std::vector<Constraint> parse_constraint(std::string_view text, const Names& names) {
  Parser p(text, names);
  std::vector<Constraint> rows;
  LinearExpr lhs = p.expression();
  while (is_comparison(p.peek())) {
    const std::string op = p.next().text;
    LinearExpr rhs = p.expression();
    if (op == ">=") {
      rows.push_back(make_row(lhs, rhs, 1, 0, ConstraintKind::Inequality));
    } else if (op == "<=") {
      rows.push_back(make_row(lhs, rhs, -1, 0, ConstraintKind::Inequality));
    } else if (op == ">") {
      rows.push_back(make_row(lhs, rhs, 1, -1, ConstraintKind::Inequality));
    } else if (op == "<") {
      rows.push_back(make_row(lhs, rhs, -1, -1, ConstraintKind::Inequality));
    } else {
      rows.push_back(make_row(lhs, rhs, 1, 0, ConstraintKind::Equality));
    }
    lhs = std::move(rhs);
  }
  if (rows.empty()) p.fail("expected a comparison", p.peek());
  p.expect_end();
  return rows;
}

AffineMap parse_map(const std::vector<std::string>& rows, const Names& names) {
  IntMatrix a(rows.size(), names.dims.size());
  IntMatrix b(rows.size(), names.params.size());
  IntVec c(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    LinearExpr e = parse_affine(rows[i], names);
    for (std::size_t j = 0; j < names.dims.size(); ++j) a(i, j) = e.a[j];
    for (std::size_t j = 0; j < names.params.size(); ++j) b(i, j) = e.b[j];
    c[i] = e.c;
  }
  return AffineMap(std::move(a), std::move(b), std::move(c));
}

std::string format_affine(const IntVec& a, const IntVec& b, const Int& c, const Names& names) {
  std::string out;
  for (std::size_t j = 0; j < a.size(); ++j) append_term(out, a[j], names.dims.at(j));
  for (std::size_t j = 0; j < b.size(); ++j) append_term(out, b[j], names.params.at(j));
  append_term(out, c, "");
  return out.empty() ? "0" : out;
}

std::string format_constraint(const Constraint& row, const Names& names) {
  // Pick a unit-coefficient variable to put on the left: "i >= M - 1".
  std::optional<std::pair<bool, std::size_t>> pivot;
  for (std::size_t j = 0; j < row.a.size() && !pivot; ++j)
    if (row.a[j] == 1 || row.a[j] == -1) pivot = {true, j};
  for (std::size_t j = 0; j < row.b.size() && !pivot; ++j)
    if (row.b[j] == 1 || row.b[j] == -1) pivot = {false, j};
  const bool eq = row.kind == ConstraintKind::Equality;
  if (!pivot) return format_affine(row.a, row.b, row.c, names) + (eq ? " == 0" : " >= 0");

  const auto [is_dim, j] = *pivot;
  const Int coef = is_dim ? row.a[j] : row.b[j];
  const std::string& name = is_dim ? names.dims.at(j) : names.params.at(j);
  IntVec ra = row.a;
  IntVec rb = row.b;
  (is_dim ? ra : rb)[j] = 0;
  Int rc = row.c;
  // coef·v + rest {>=,==} 0.  With coef = 1 the right side is -rest, with
  // coef = -1 it is rest.
  if (coef == 1) {
    for (auto& x : ra) x = -x;
    for (auto& x : rb) x = -x;
    rc = -rc;
  }
  const std::string rhs = format_affine(ra, rb, rc, names);
  if (eq) return coef == 1 ? name + " == " + rhs : rhs + " == " + name;
  return name + (coef == 1 ? " >= " : " <= ") + rhs;
}

std::vector<std::string> format_map(const AffineMap& f, const Names& names) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < f.out_dim(); ++i) {
    IntVec a(f.in_dim());
    IntVec b(f.n_params());
    for (std::size_t j = 0; j < f.in_dim(); ++j) a[j] = f.linear()(i, j);
    for (std::size_t j = 0; j < f.n_params(); ++j) b[j] = f.param()(i, j);
    out.push_back(format_affine(a, b, f.offset()[i], names));
  }
  return out;
}

std::vector<std::string> format_polyhedron(const Polyhedron& p, const Names& names) {
  std::vector<std::string> out;
  for (const auto& row : p.constraints()) out.push_back(format_constraint(row, names));
  return out;
}

}  // namespace hsd
