#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flower/diagnostics.hpp"

namespace flower {

/// Arithmetic over pixel operands and integer literals. Operand 0 is `pix`
/// for unary kinds and `a` for binary kinds; operand 1 is `b`.
struct Expr {
  enum class Kind { Literal, Operand, Add, Sub, Mul, Div, Min, Max, Abs, Clamp };

  Kind kind = Kind::Literal;
  int64_t value = 0;  // Literal
  int operand = 0;    // Operand index
  std::vector<Expr> args;
  SourceLoc loc;

  static Expr literal(int64_t v) {
    Expr e;
    e.kind = Kind::Literal;
    e.value = v;
    return e;
  }
  static Expr make_operand(int idx) {
    Expr e;
    e.kind = Kind::Operand;
    e.operand = idx;
    return e;
  }
  static Expr make(Kind k, std::vector<Expr> args) {
    Expr e;
    e.kind = k;
    e.args = std::move(args);
    return e;
  }
};

/// Exact rational stencil coefficient.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;
};

struct ChannelDecl {
  std::string name;
  int elem_width = 1;               // lanes per token; set by vectorize
  std::optional<int> depth;         // FIFO slots; defaults applied in graph
  SourceLoc loc;
};

enum class ImageBinding { HostInput, HostOutput, Virtual };

struct ImageDecl {
  std::string name;
  int width = 0;
  int height = 0;
  ImageBinding binding = ImageBinding::HostInput;
  std::string path;     // HostInput / HostOutput
  std::string channel;  // Virtual
  SourceLoc loc;
};

enum class TaskKind { Point, Point2, Local, Split, MemRead, MemWrite };

const char* task_kind_name(TaskKind kind);

/// Reference to a channel or image by index into the owning Program.
struct Ref {
  enum class Kind { Channel, Image };
  Kind kind = Kind::Channel;
  int index = 0;

  bool operator==(const Ref&) const = default;
};

struct TaskDecl {
  std::string name;
  TaskKind kind = TaskKind::Point;
  Expr expr;                      // Point / Point2
  int stencil_k = 0;              // Local
  std::vector<Rational> mask;     // Local, row-major k*k
  int64_t mask_divisor = 1;       // Local, applied to every coefficient
  std::optional<int> split_count; // Split, validated against writes
  std::vector<std::string> reads;   // surface names, as written
  std::vector<std::string> writes;
  SourceLoc loc;
};

/// Parse result before name resolution.
struct Ast {
  std::vector<ChannelDecl> channels;
  std::vector<ImageDecl> images;
  std::vector<TaskDecl> tasks;
  std::optional<int> vector_length;
  SourceLoc vector_length_loc;
};

/// Resolved task: reads/writes bound to channel/image indices. MemRead and
/// MemWrite tasks only appear after the burst transform.
struct Task {
  std::string name;
  TaskKind kind = TaskKind::Point;
  Expr expr;
  int stencil_k = 0;
  std::vector<Rational> mask;  // divisor folded in
  std::vector<Ref> reads;
  std::vector<Ref> writes;
  SourceLoc loc;
};

/// Fully resolved program. All images share one (width, height).
struct Program {
  std::vector<ChannelDecl> channels;
  std::vector<ImageDecl> images;
  std::vector<Task> tasks;
  int vector_length = 1;
  int width = 0;
  int height = 0;
  int default_fifo_depth = 2;

  const std::string& ref_name(const Ref& r) const {
    return r.kind == Ref::Kind::Channel ? channels[r.index].name : images[r.index].name;
  }
  int find_channel(const std::string& name) const;
  int find_image(const std::string& name) const;
  int find_task(const std::string& name) const;
};

}  // namespace flower
