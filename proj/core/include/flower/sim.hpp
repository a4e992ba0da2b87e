#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flower/ast.hpp"

namespace flower {

struct ImageBuf {
  int width = 0;
  int height = 0;
  std::vector<int32_t> data;  // row-major

  ImageBuf() = default;
  ImageBuf(int w, int h, int32_t fill = 0) : width(w), height(h), data(size_t(w) * h, fill) {}

  int32_t at(int x, int y) const { return data[size_t(y) * width + x]; }
  int32_t& at(int x, int y) { return data[size_t(y) * width + x]; }
};

enum class SimStatus { Ok, MissingInput, DimMismatch, Deadlock };

struct SimResult {
  SimStatus status = SimStatus::Ok;
  std::string error;                         // populated when status != Ok
  std::map<std::string, ImageBuf> outputs;   // host-output image name -> pixels
  int64_t cycles = 0;
  std::map<std::string, int64_t> per_task_busy;
  std::map<std::string, int> fifo_high_water;  // tokens, per channel
  std::vector<std::string> blocked_tasks;      // Deadlock only

  /// Key-value text: task=<name> busy=<n> lines, fifo=<name> high_water=<n>
  /// lines, then cycles=<n>.
  std::string to_string() const;
};

/// Whole-image evaluation in topological order; the semantics oracle.
/// Stencils clamp to the image edge.
SimResult run_reference(const Program& program,
                        const std::map<std::string, ImageBuf>& inputs);

enum class SimMode { Dataflow, Sequential };

/// Cycle-approximate execution. Dataflow advances all tasks in lockstep
/// cycles over bounded FIFOs: a task fires at most one token per cycle when
/// every input has a token and every output it would push to has space, and
/// outputs surface one cycle after the fire (stencils additionally lag by
/// their fill). Sequential runs one task at a time to completion over
/// unbounded buffers. Outputs are bit-identical to run_reference either way.
SimResult run_dataflow(const Program& program, const std::map<std::string, ImageBuf>& inputs,
                       SimMode mode);

/// Evaluates a point/point2 expression with int32 wraparound per node;
/// division by zero yields zero. Shared by the interpreters.
int32_t eval_expr(const Expr& expr, int32_t a, int32_t b);

}  // namespace flower
