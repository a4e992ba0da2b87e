#pragma once

#include <optional>

#include "flower/ast.hpp"
#include "flower/diagnostics.hpp"

namespace flower {

/// Binds names, substitutes virtual images with their channels in task I/O
/// lists, enforces per-kind arity and the shared image size, and defaults
/// vector_length to 1. Deterministic: identical Ast yields identical Program.
std::optional<Program> resolve(const Ast& ast, Diagnostics& diags);

}  // namespace flower
