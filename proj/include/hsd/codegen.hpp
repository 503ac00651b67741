#pragma once

// C source emission for tile programs.

#include "hsd/instrument.hpp"

#include <string>
#include <string_view>

namespace hsd {

enum class EmitTarget { GenericStubs, Pthreads };

/// "generic_stubs" or "pthreads".  "cuda" and "x10" are documented
/// templates only and raise an Error saying so; anything else is unsupported.
EmitTarget parse_emit_target(std::string_view name);
std::string_view to_string(EmitTarget t);

/// Deterministic: the same program and target give identical bytes.
std::string emit(const TileProgram& tp, EmitTarget target, std::string_view title = "program");

/// Token-level counts over emitted source.  Comments, strings and
/// preprocessor lines are skipped; a call site is a name followed by "("
/// that is not a definition.
struct SourceStructure {
  std::size_t claim_loops = 0;
  std::size_t acquire_sites = 0;
  std::size_t check_sites = 0;
  std::size_t tile_sites = 0;
  std::size_t update_sites = 0;
};

SourceStructure scan_structure(std::string_view source);

}  // namespace hsd
