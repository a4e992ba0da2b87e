#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flower/ast.hpp"

namespace flower {

struct TaskNode {
  int task = 0;                 // index into Program::tasks
  std::vector<int> in_edges;    // indices into DataflowGraph::edges
  std::vector<int> out_edges;
  std::vector<int> global_reads;   // image indices
  std::vector<int> global_writes;
};

struct ChannelEdge {
  int channel = 0;    // index into Program::channels
  int producer = -1;  // node index, -1 while dangling
  int consumer = -1;
  int depth = 2;
};

struct DataflowGraph {
  std::vector<TaskNode> nodes;
  std::vector<ChannelEdge> edges;
};

enum class ViolationKind {
  CyclicGraph,
  MultipleWriters,
  MultipleReaders,
  DanglingChannel,
  NoMemoryTraffic,  // warning: kernel without global reads or writes
};

struct Violation {
  ViolationKind kind;
  bool is_error = true;
  std::string subject;             // offending channel or task name
  std::vector<std::string> names;  // cycle path for CyclicGraph
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const {
    for (const auto& v : violations)
      if (v.is_error) return false;
    return true;
  }
  std::string to_string() const;
};

/// One node per task, one edge per channel with a producer or consumer.
/// Declared-but-unused channels produce no edge; validate() flags them.
DataflowGraph extract_graph(const Program& program);

/// Canonical dataflow rules: acyclic, one producer and one consumer per
/// channel. Host images must have at most one writer.
ValidationReport validate(const Program& program, const DataflowGraph& graph);

/// Kahn's algorithm; ties broken by smallest declaration index, so the
/// result is the lexicographically least topological order.
std::vector<int> topo_sort(const DataflowGraph& graph);

/// Graphviz text. Task nodes are circles, host images are boxes.
std::string to_dot(const Program& program, const DataflowGraph& graph);

}  // namespace flower
