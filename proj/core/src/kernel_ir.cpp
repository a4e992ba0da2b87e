#include "flower/kernel_ir.hpp"

#include <map>

namespace flower {

std::optional<KernelIR> build_kernel_ir(const Program& program, const DataflowGraph& graph,
                                        Diagnostics& diags) {
  if (program.tasks.empty()) {
    diags.error({}, "program has no tasks");
    return std::nullopt;
  }

  KernelIR ir;
  ir.vector_length = program.vector_length;
  ir.width = program.width;
  ir.height = program.height;

  std::vector<int> order = topo_sort(graph);
  if (order.size() != graph.nodes.size()) {
    diags.error({}, "task graph is cyclic; validate before scheduling");
    return std::nullopt;
  }

  // Global ports in image declaration order, named input_data/output_data
  // (numbered when a direction has several ports).
  std::vector<char> used(program.images.size(), 0);
  for (const auto& node : graph.nodes) {
    for (int img : node.global_reads) used[img] = 1;
    for (int img : node.global_writes) used[img] = 1;
  }
  int inputs = 0, outputs = 0;
  for (size_t i = 0; i < program.images.size(); ++i)
    if (used[i]) (program.images[i].binding == ImageBinding::HostInput ? inputs : outputs)++;
  std::map<int, int> image_port;
  int input_seen = 0, output_seen = 0;
  for (size_t i = 0; i < program.images.size(); ++i) {
    if (!used[i]) continue;
    InterfaceDesc desc;
    desc.image = int(i);
    if (program.images[i].binding == ImageBinding::HostInput) {
      desc.direction = PortDirection::Read;
      desc.port_name = inputs == 1 ? "input_data" : "input_data" + std::to_string(input_seen);
      ++input_seen;
    } else {
      desc.direction = PortDirection::Write;
      desc.port_name =
          outputs == 1 ? "output_data" : "output_data" + std::to_string(output_seen);
      ++output_seen;
    }
    desc.bundle = "gmem0";
    desc.bank = -1;
    desc.bus_width_bits = 32 * program.vector_length;
    image_port[int(i)] = int(ir.interfaces.size());
    ir.interfaces.push_back(std::move(desc));
  }

  std::map<int, int> edge_spec;  // graph edge -> ChannelSpec index
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const ChannelEdge& edge = graph.edges[e];
    ChannelSpec spec;
    spec.name = program.channels[edge.channel].name;
    spec.channel = edge.channel;
    spec.depth = edge.depth;
    spec.elem_width = program.channels[edge.channel].elem_width;
    edge_spec[int(e)] = int(ir.channels.size());
    ir.channels.push_back(std::move(spec));
  }

  for (size_t pos = 0; pos < order.size(); ++pos) {
    const TaskNode& node = graph.nodes[order[pos]];
    const Task& task = program.tasks[node.task];
    TaskIR t;
    t.ir_name = "task" + std::to_string(pos + 1);
    t.source_name = task.name;
    t.task = node.task;
    t.kind = task.kind;
    t.stencil_k = task.stencil_k;
    // Ports for reads, then writes, in the task's own operand order.
    for (const auto& ref : task.reads) {
      if (ref.kind == Ref::Kind::Image)
        t.global_ports.push_back(image_port.at(ref.index));
    }
    for (const auto& ref : task.writes) {
      if (ref.kind == Ref::Kind::Image)
        t.global_ports.push_back(image_port.at(ref.index));
    }
    for (int e : node.in_edges) {
      int spec = edge_spec.at(e);
      t.in_channels.push_back(spec);
      ir.channels[spec].consumer = int(pos);
    }
    for (int e : node.out_edges) {
      int spec = edge_spec.at(e);
      t.out_channels.push_back(spec);
      ir.channels[spec].producer = int(pos);
    }
    ir.tasks.push_back(std::move(t));
  }

  return ir;
}

}  // namespace flower
