#include "flower/driver.hpp"

#include <fstream>
#include <sstream>

#include "flower/parser.hpp"
#include "flower/resolver.hpp"

namespace flower {

std::optional<Program> load_program(const std::string& source, Diagnostics& diags) {
  auto ast = parse_program(source, diags);
  if (!ast) return std::nullopt;
  return resolve(*ast, diags);
}

std::optional<Program> load_program_file(const std::string& path, Diagnostics& diags,
                                         bool* io_error) {
  if (io_error) *io_error = false;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (io_error) *io_error = true;
    diags.error({}, "cannot open '" + path + "'");
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_program(buf.str(), diags);
}

std::optional<CompiledProgram> compile_pipeline(const Program& resolved,
                                                const PipelineOptions& options,
                                                Diagnostics& diags) {
  Program program = resolved;
  if (options.fifo_depth) program.default_fifo_depth = *options.fifo_depth;

  int v = options.vector_length.value_or(program.vector_length);
  auto vectorized = vectorize(program, v, diags);
  if (!vectorized) return std::nullopt;
  program = std::move(*vectorized);

  if (options.burst) program = burst_split(program);

  CompiledProgram result;
  result.graph = extract_graph(program);
  result.report = validate(program, result.graph);
  if (!result.report.ok()) {
    for (const auto& violation : result.report.violations)
      if (violation.is_error) diags.error({}, violation.message);
    return std::nullopt;
  }

  auto ir = build_kernel_ir(program, result.graph, diags);
  if (!ir) return std::nullopt;
  result.ir = assign_bundles(std::move(*ir), options.gmem_opt);
  result.program = std::move(program);
  return result;
}

}  // namespace flower
