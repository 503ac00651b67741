#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hsd::cli {

/// Exit codes: 0 success, 1 semantic failure (violation, mismatch,
/// timeout), 2 usage, parse or I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hsd::cli
