#include "flower/latency.hpp"

#include <algorithm>
#include <sstream>

namespace flower {

TaskLatency estimate_task_latency(TaskKind kind, int stencil_k, int width, int height,
                                  int vector_length) {
  int64_t tokens = (int64_t(width) * height + vector_length - 1) / vector_length;
  int64_t fill = 1;
  if (kind == TaskKind::Local) {
    int64_t rows = stencil_k / 2;
    fill = rows * (width / vector_length) + (stencil_k + 1) / 2;
  }
  return {tokens + fill, fill};
}

LatencyReport estimate_kernel_latency(const KernelIR& ir, ScheduleMode mode,
                                      const std::map<std::string, int64_t>& overrides) {
  LatencyReport report;
  int64_t tokens = ir.tokens();

  std::vector<TaskLatency> latency(ir.tasks.size());
  for (size_t i = 0; i < ir.tasks.size(); ++i) {
    const TaskIR& task = ir.tasks[i];
    auto it = overrides.find(task.source_name);
    if (it != overrides.end()) {
      latency[i].total = it->second;
      latency[i].fill = std::max<int64_t>(0, it->second - tokens);
    } else {
      latency[i] = estimate_task_latency(task.kind, task.stencil_k, ir.width, ir.height,
                                         ir.vector_length);
    }
    report.per_task.push_back({task.source_name, latency[i].total, latency[i].fill});
  }

  if (mode != ScheduleMode::Dataflow) {
    int64_t total = 0;
    for (const auto& l : latency) total += l.total;
    report.kernel_sequential = total;
  }
  if (mode != ScheduleMode::Sequential) {
    // Longest fill path through the channel graph; tasks are already
    // topologically ordered in the IR.
    std::vector<int64_t> dist(ir.tasks.size(), 0);
    for (size_t i = 0; i < ir.tasks.size(); ++i) {
      int64_t best = 0;
      for (int c : ir.tasks[i].in_channels) {
        int producer = ir.channels[c].producer;
        if (producer >= 0) best = std::max(best, dist[producer]);
      }
      dist[i] = best + latency[i].fill;
    }
    int64_t critical = 0;
    for (int64_t d : dist) critical = std::max(critical, d);
    report.kernel_dataflow = tokens + critical;
  }
  return report;
}

std::string LatencyReport::to_string() const {
  std::ostringstream out;
  for (const auto& t : per_task)
    out << "task=" << t.name << " L=" << t.total << " d=" << t.fill << '\n';
  if (kernel_sequential >= 0) out << "sequential=" << kernel_sequential << '\n';
  if (kernel_dataflow >= 0) out << "dataflow=" << kernel_dataflow << '\n';
  return out.str();
}

}  // namespace flower
