#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flower/kernel_ir.hpp"

namespace flower {

struct TaskLatency {
  int64_t total = 0;  // L: cycles from first input to last output
  int64_t fill = 0;   // d: pipeline fill before the first output token
};

/// Analytic single-task model at initiation interval 1. N = W*H/v tokens;
/// read/write/split/point/point2 fill with d = 1, a k x k stencil fills
/// floor(k/2) rows plus ceil(k/2) cycles; L = N + d.
TaskLatency estimate_task_latency(TaskKind kind, int stencil_k, int width, int height,
                                  int vector_length);

enum class ScheduleMode { Sequential, Dataflow, Both };

struct LatencyReport {
  struct PerTask {
    std::string name;  // source task name
    int64_t total = 0;
    int64_t fill = 0;
  };
  std::vector<PerTask> per_task;       // IR order
  int64_t kernel_sequential = -1;      // -1 when the mode was not requested
  int64_t kernel_dataflow = -1;
  int frequency_mhz = 200;             // informational

  /// Machine-readable key-value text: one `task=<name> L=<n> d=<n>` line per
  /// task, then `sequential=<n>` and/or `dataflow=<n>`.
  std::string to_string() const;
};

/// Sequential: sum of task latencies. Dataflow: N plus the largest fill sum
/// over any path through the task graph. Overrides pin L for named tasks
/// (fill is then derived as L - N, floored at zero), reproducing reported
/// kernel latencies from per-task measurements.
LatencyReport estimate_kernel_latency(const KernelIR& ir, ScheduleMode mode,
                                      const std::map<std::string, int64_t>& overrides = {});

}  // namespace flower
