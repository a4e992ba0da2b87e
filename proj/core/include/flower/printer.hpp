#pragma once

#include <string>

#include "flower/ast.hpp"

namespace flower {

/// Canonical source form of an Ast. parse(print(parse(s))) reproduces the
/// same Ast, and print is a fixed point of parse-then-print.
std::string print_program(const Ast& ast);

std::string print_expr(const Expr& expr, TaskKind kind);

}  // namespace flower
