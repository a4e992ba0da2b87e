#pragma once

#include <optional>
#include <string_view>

#include "flower/ast.hpp"
#include "flower/diagnostics.hpp"

namespace flower {

/// Parses DSL source into an unresolved Ast. Returns nullopt and a rendered
/// diagnostic on the first syntax error. The parser accepts anything that is
/// grammatically well formed; semantic checks live in resolve().
std::optional<Ast> parse_program(std::string_view source, Diagnostics& diags);

}  // namespace flower
