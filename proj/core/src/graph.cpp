#include "flower/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace flower {

DataflowGraph extract_graph(const Program& program) {
  DataflowGraph graph;
  graph.nodes.resize(program.tasks.size());

  // One edge per channel that any task touches; unused channels get none.
  std::vector<int> channel_edge(program.channels.size(), -1);
  auto edge_for = [&](int channel) {
    if (channel_edge[channel] < 0) {
      channel_edge[channel] = int(graph.edges.size());
      ChannelEdge edge;
      edge.channel = channel;
      edge.depth = program.channels[channel].depth.value_or(program.default_fifo_depth);
      graph.edges.push_back(edge);
    }
    return channel_edge[channel];
  };

  for (size_t t = 0; t < program.tasks.size(); ++t) {
    TaskNode& node = graph.nodes[t];
    node.task = int(t);
    for (const auto& ref : program.tasks[t].reads) {
      if (ref.kind == Ref::Kind::Channel) {
        int e = edge_for(ref.index);
        node.in_edges.push_back(e);
        if (graph.edges[e].consumer < 0) graph.edges[e].consumer = int(t);
      } else {
        node.global_reads.push_back(ref.index);
      }
    }
    for (const auto& ref : program.tasks[t].writes) {
      if (ref.kind == Ref::Kind::Channel) {
        int e = edge_for(ref.index);
        node.out_edges.push_back(e);
        if (graph.edges[e].producer < 0) graph.edges[e].producer = int(t);
      } else {
        node.global_writes.push_back(ref.index);
      }
    }
  }
  return graph;
}

namespace {

// Smallest-declaration-index Kahn; leftover nodes are on cycles.
std::vector<int> kahn_order(const DataflowGraph& graph, std::vector<int>* leftover) {
  std::vector<int> indegree(graph.nodes.size(), 0);
  for (const auto& edge : graph.edges)
    if (edge.producer >= 0 && edge.consumer >= 0 && edge.producer != edge.consumer)
      ++indegree[edge.consumer];

  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (size_t i = 0; i < graph.nodes.size(); ++i)
    if (indegree[i] == 0) ready.push(int(i));

  std::vector<int> order;
  order.reserve(graph.nodes.size());
  while (!ready.empty()) {
    int n = ready.top();
    ready.pop();
    order.push_back(n);
    for (int e : graph.nodes[n].out_edges) {
      int next = graph.edges[e].consumer;
      if (next < 0 || next == n) continue;
      if (--indegree[next] == 0) ready.push(next);
    }
  }
  if (leftover) {
    leftover->clear();
    for (size_t i = 0; i < graph.nodes.size(); ++i)
      if (indegree[i] > 0) leftover->push_back(int(i));
  }
  return order;
}

// Walks producer->consumer edges among the given nodes until one repeats.
std::vector<int> find_cycle(const DataflowGraph& graph, const std::vector<int>& candidates) {
  if (candidates.empty()) return {};
  std::vector<char> on_cycle(graph.nodes.size(), 0);
  for (int n : candidates) on_cycle[n] = 1;

  std::vector<int> path;
  std::vector<int> pos(graph.nodes.size(), -1);
  int cur = candidates.front();
  while (pos[cur] < 0) {
    pos[cur] = int(path.size());
    path.push_back(cur);
    int next = -1;
    for (int e : graph.nodes[cur].out_edges) {
      int c = graph.edges[e].consumer;
      if (c >= 0 && on_cycle[c]) {
        next = c;
        break;
      }
    }
    if (next < 0) return {cur};  // self-loop via dangling structure
    cur = next;
  }
  return std::vector<int>(path.begin() + pos[cur], path.end());
}

}  // namespace

ValidationReport validate(const Program& program, const DataflowGraph& graph) {
  ValidationReport report;

  auto add = [&](ViolationKind kind, bool is_error, std::string subject, std::string message) {
    Violation v;
    v.kind = kind;
    v.is_error = is_error;
    v.subject = std::move(subject);
    v.message = std::move(message);
    report.violations.push_back(std::move(v));
  };

  // Channel producer/consumer multiplicity, via the raw task lists so every
  // extra writer or reader is reported even though edges keep only one.
  for (size_t c = 0; c < program.channels.size(); ++c) {
    std::vector<std::string> writers, readers;
    for (const auto& task : program.tasks) {
      for (const auto& ref : task.writes)
        if (ref.kind == Ref::Kind::Channel && ref.index == int(c)) writers.push_back(task.name);
      for (const auto& ref : task.reads)
        if (ref.kind == Ref::Kind::Channel && ref.index == int(c)) readers.push_back(task.name);
    }
    const std::string& name = program.channels[c].name;
    if (writers.size() > 1)
      add(ViolationKind::MultipleWriters, true, name,
          "channel '" + name + "' has " + std::to_string(writers.size()) + " writers");
    if (readers.size() > 1)
      add(ViolationKind::MultipleReaders, true, name,
          "channel '" + name + "' has " + std::to_string(readers.size()) + " readers");
    if (writers.empty() && readers.empty())
      add(ViolationKind::DanglingChannel, true, name,
          "channel '" + name + "' is declared but never used");
    else if (writers.empty())
      add(ViolationKind::DanglingChannel, true, name,
          "channel '" + name + "' has a reader but no writer");
    else if (readers.empty())
      add(ViolationKind::DanglingChannel, true, name,
          "channel '" + name + "' has a writer but no reader");
  }

  // Host images: single writer.
  for (size_t i = 0; i < program.images.size(); ++i) {
    if (program.images[i].binding == ImageBinding::Virtual) continue;
    std::vector<std::string> writers;
    for (const auto& task : program.tasks)
      for (const auto& ref : task.writes)
        if (ref.kind == Ref::Kind::Image && ref.index == int(i)) writers.push_back(task.name);
    if (writers.size() > 1)
      add(ViolationKind::MultipleWriters, true, program.images[i].name,
          "image '" + program.images[i].name + "' has " + std::to_string(writers.size()) +
              " writers");
  }

  std::vector<int> leftover;
  kahn_order(graph, &leftover);
  if (!leftover.empty()) {
    std::vector<int> cycle = find_cycle(graph, leftover);
    Violation v;
    v.kind = ViolationKind::CyclicGraph;
    v.is_error = true;
    std::string text;
    for (int n : cycle) {
      v.names.push_back(program.tasks[graph.nodes[n].task].name);
      if (!text.empty()) text += " -> ";
      text += v.names.back();
    }
    v.message = "task graph has a cycle: " + text;
    report.violations.push_back(std::move(v));
  }

  bool any_read = false, any_write = false;
  for (const auto& node : graph.nodes) {
    any_read |= !node.global_reads.empty();
    any_write |= !node.global_writes.empty();
  }
  if (!program.tasks.empty() && (!any_read || !any_write))
    add(ViolationKind::NoMemoryTraffic, false, "",
        std::string("kernel has no global memory ") + (!any_read ? "reads" : "writes"));

  return report;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& v : violations)
    out << (v.is_error ? "error: " : "warning: ") << v.message << '\n';
  return out.str();
}

std::vector<int> topo_sort(const DataflowGraph& graph) {
  std::vector<int> order = kahn_order(graph, nullptr);
  return order;
}

std::string to_dot(const Program& program, const DataflowGraph& graph) {
  std::ostringstream out;
  out << "digraph dataflow {\n";
  for (const auto& node : graph.nodes)
    out << "    \"" << program.tasks[node.task].name << "\" [shape=circle];\n";
  // Host images render as memory boxes, as interface annotations.
  std::vector<char> image_used(program.images.size(), 0);
  for (const auto& node : graph.nodes) {
    for (int img : node.global_reads) image_used[img] = 1;
    for (int img : node.global_writes) image_used[img] = 1;
  }
  for (size_t i = 0; i < program.images.size(); ++i)
    if (image_used[i]) out << "    \"" << program.images[i].name << "\" [shape=box];\n";
  for (const auto& edge : graph.edges) {
    if (edge.producer < 0 || edge.consumer < 0) continue;
    out << "    \"" << program.tasks[graph.nodes[edge.producer].task].name << "\" -> \""
        << program.tasks[graph.nodes[edge.consumer].task].name << "\" [label=\""
        << program.channels[edge.channel].name << "\"];\n";
  }
  for (const auto& node : graph.nodes) {
    for (int img : node.global_reads)
      out << "    \"" << program.images[img].name << "\" -> \""
          << program.tasks[node.task].name << "\";\n";
    for (int img : node.global_writes)
      out << "    \"" << program.tasks[node.task].name << "\" -> \""
          << program.images[img].name << "\";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace flower
