#pragma once

// Text form of affine expressions and constraints, shared by every file
// format.  Grammar: integer literals, identifiers, + - *, parentheses; a
// product needs at least one constant operand.  Constraints chain
// comparisons: "0 <= i <= M - 1" yields two rows.

#include "hsd/affine.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace hsd {

/// Identifier scope: dims map to z coordinates, params to s coordinates.
struct Names {
  std::vector<std::string> dims;
  std::vector<std::string> params;
};

/// a·z + b·s + c.
struct LinearExpr {
  IntVec a;
  IntVec b;
  Int c;
};

/// Throws ParseError (column() is 1-based within `text`) or ResolutionError.
LinearExpr parse_affine(std::string_view text, const Names& names);
std::vector<Constraint> parse_constraint(std::string_view text, const Names& names);
/// One expression per output row.
AffineMap parse_map(const std::vector<std::string>& rows, const Names& names);

std::string format_affine(const IntVec& a, const IntVec& b, const Int& c, const Names& names);
/// Output parses back to the identical row.
std::string format_constraint(const Constraint& row, const Names& names);
std::vector<std::string> format_map(const AffineMap& f, const Names& names);
std::vector<std::string> format_polyhedron(const Polyhedron& p, const Names& names);

}  // namespace hsd
