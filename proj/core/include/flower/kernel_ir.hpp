#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flower/ast.hpp"
#include "flower/diagnostics.hpp"
#include "flower/graph.hpp"

namespace flower {

enum class PortDirection { Read, Write };

/// One global-memory port of the top-level kernel.
struct InterfaceDesc {
  std::string port_name;  // input_data / output_data, numbered when several
  PortDirection direction = PortDirection::Read;
  int image = 0;          // index into Program::images
  std::string bundle;     // AXI bundle, e.g. gmem0
  int bank = -1;          // memory bank, -1 until assigned
  int bus_width_bits = 32;
};

struct ChannelSpec {
  std::string name;
  int channel = 0;  // index into Program::channels
  int depth = 2;
  int elem_width = 1;
  int producer = -1;  // positions in KernelIR::tasks
  int consumer = -1;
};

struct TaskIR {
  std::string ir_name;      // task1..taskN in schedule order
  std::string source_name;
  int task = 0;             // index into Program::tasks
  TaskKind kind = TaskKind::Point;
  int stencil_k = 0;        // Local tasks
  std::vector<int> global_ports;  // interface indices, reads then writes
  std::vector<int> in_channels;   // ChannelSpec indices
  std::vector<int> out_channels;
};

/// Scheduled kernel: tasks in a valid topological order plus channel and
/// interface descriptors. The single source of truth for all emitters.
struct KernelIR {
  std::string kernel_name = "hls_top";
  std::vector<TaskIR> tasks;
  std::vector<ChannelSpec> channels;
  std::vector<InterfaceDesc> interfaces;
  int vector_length = 1;
  int width = 0;
  int height = 0;

  int tokens() const { return width * height / vector_length; }
};

/// Requires a validated program/graph pair. Interfaces are enumerated in
/// image declaration order; tasks are renamed task1..taskN in schedule order.
std::optional<KernelIR> build_kernel_ir(const Program& program, const DataflowGraph& graph,
                                        Diagnostics& diags);

}  // namespace flower
