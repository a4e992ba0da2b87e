#pragma once

#include <optional>
#include <string>

#include "flower/ast.hpp"
#include "flower/diagnostics.hpp"
#include "flower/graph.hpp"
#include "flower/kernel_ir.hpp"
#include "flower/transform.hpp"

namespace flower {

struct PipelineOptions {
  std::optional<int> vector_length;  // overrides the program's constant
  bool burst = true;
  bool gmem_opt = false;
  int bank_count = 4;
  std::optional<int> fifo_depth;     // default depth for unannotated channels
};

struct CompiledProgram {
  Program program;  // after vectorize/burst rewrites
  DataflowGraph graph;
  ValidationReport report;
  KernelIR ir;
};

/// parse + resolve. On failure returns nullopt with diagnostics filled in.
std::optional<Program> load_program(const std::string& source, Diagnostics& diags);

/// Reads the file and load_program()s it. Missing file reports io_error.
std::optional<Program> load_program_file(const std::string& path, Diagnostics& diags,
                                         bool* io_error = nullptr);

/// vectorize -> burst split -> graph extraction -> validation -> kernel IR
/// -> bundle assignment. Stops at the first failing stage.
std::optional<CompiledProgram> compile_pipeline(const Program& resolved,
                                                const PipelineOptions& options,
                                                Diagnostics& diags);

}  // namespace flower
