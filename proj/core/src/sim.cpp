#include "flower/sim.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <numeric>
#include <sstream>

#include "flower/graph.hpp"

namespace flower {

namespace {

int32_t wrap32(int64_t x) { return int32_t(uint32_t(uint64_t(x))); }

int32_t clamp_i(int32_t x, int32_t lo, int32_t hi) { return std::min(std::max(x, lo), hi); }

// Scaled integer form of a rational mask: out = trunc(sum(coeff*pix) / denom).
struct ScaledMask {
  int k = 0;
  std::vector<int64_t> coeff;
  int64_t denom = 1;
};

ScaledMask scale_mask(const Task& task) {
  ScaledMask m;
  m.k = task.stencil_k;
  int64_t common = 1;
  for (const auto& r : task.mask) common = std::lcm(common, r.den);
  m.denom = common;
  m.coeff.reserve(task.mask.size());
  for (const auto& r : task.mask) m.coeff.push_back(r.num * (common / r.den));
  return m;
}

}  // namespace

int32_t eval_expr(const Expr& e, int32_t a, int32_t b) {
  switch (e.kind) {
    case Expr::Kind::Literal: return wrap32(e.value);
    case Expr::Kind::Operand: return e.operand == 0 ? a : b;
    case Expr::Kind::Add:
      return wrap32(int64_t(eval_expr(e.args[0], a, b)) + eval_expr(e.args[1], a, b));
    case Expr::Kind::Sub:
      return wrap32(int64_t(eval_expr(e.args[0], a, b)) - eval_expr(e.args[1], a, b));
    case Expr::Kind::Mul:
      return wrap32(int64_t(eval_expr(e.args[0], a, b)) * eval_expr(e.args[1], a, b));
    case Expr::Kind::Div: {
      int64_t den = eval_expr(e.args[1], a, b);
      if (den == 0) return 0;
      return wrap32(int64_t(eval_expr(e.args[0], a, b)) / den);
    }
    case Expr::Kind::Min:
      return std::min(eval_expr(e.args[0], a, b), eval_expr(e.args[1], a, b));
    case Expr::Kind::Max:
      return std::max(eval_expr(e.args[0], a, b), eval_expr(e.args[1], a, b));
    case Expr::Kind::Abs: {
      int32_t v = eval_expr(e.args[0], a, b);
      return v < 0 ? wrap32(-int64_t(v)) : v;
    }
    case Expr::Kind::Clamp:
      return clamp_i(eval_expr(e.args[0], a, b), eval_expr(e.args[1], a, b),
                     eval_expr(e.args[2], a, b));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Reference interpreter: whole-image evaluation in topological order.
// ---------------------------------------------------------------------------

SimResult run_reference(const Program& program, const std::map<std::string, ImageBuf>& inputs) {
  SimResult result;
  const int w = program.width, h = program.height;

  std::vector<ImageBuf> channel_values(program.channels.size());
  std::vector<ImageBuf> image_values(program.images.size());
  for (size_t i = 0; i < program.images.size(); ++i) {
    const ImageDecl& img = program.images[i];
    if (img.binding != ImageBinding::HostInput) continue;
    auto it = inputs.find(img.name);
    if (it == inputs.end()) {
      result.status = SimStatus::MissingInput;
      result.error = "missing input image '" + img.name + "'";
      return result;
    }
    if (it->second.width != w || it->second.height != h) {
      result.status = SimStatus::DimMismatch;
      result.error = "input image '" + img.name + "' is " + std::to_string(it->second.width) +
                     "x" + std::to_string(it->second.height) + ", expected " +
                     std::to_string(w) + "x" + std::to_string(h);
      return result;
    }
    image_values[i] = it->second;
  }

  DataflowGraph graph = extract_graph(program);
  std::vector<int> order = topo_sort(graph);

  auto fetch = [&](const Ref& ref) -> const ImageBuf& {
    return ref.kind == Ref::Kind::Channel ? channel_values[ref.index]
                                          : image_values[ref.index];
  };
  auto store = [&](const Ref& ref) -> ImageBuf& {
    return ref.kind == Ref::Kind::Channel ? channel_values[ref.index]
                                          : image_values[ref.index];
  };

  for (int node : order) {
    const Task& task = program.tasks[graph.nodes[node].task];
    switch (task.kind) {
      case TaskKind::Point: {
        const ImageBuf& in = fetch(task.reads[0]);
        ImageBuf out(w, h);
        for (size_t i = 0; i < in.data.size(); ++i)
          out.data[i] = eval_expr(task.expr, in.data[i], 0);
        store(task.writes[0]) = std::move(out);
        break;
      }
      case TaskKind::Point2: {
        const ImageBuf& lhs = fetch(task.reads[0]);
        const ImageBuf& rhs = fetch(task.reads[1]);
        ImageBuf out(w, h);
        for (size_t i = 0; i < out.data.size(); ++i)
          out.data[i] = eval_expr(task.expr, lhs.data[i], rhs.data[i]);
        store(task.writes[0]) = std::move(out);
        break;
      }
      case TaskKind::Local: {
        const ImageBuf& in = fetch(task.reads[0]);
        ScaledMask mask = scale_mask(task);
        int r = mask.k / 2;
        ImageBuf out(w, h);
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            int64_t acc = 0;
            for (int wy = -r; wy <= r; ++wy) {
              int cy = clamp_i(y + wy, 0, h - 1);
              for (int wx = -r; wx <= r; ++wx) {
                int cx = clamp_i(x + wx, 0, w - 1);
                acc += mask.coeff[size_t(wy + r) * mask.k + (wx + r)] * in.at(cx, cy);
              }
            }
            out.at(x, y) = wrap32(acc / mask.denom);
          }
        }
        store(task.writes[0]) = std::move(out);
        break;
      }
      case TaskKind::Split:
      case TaskKind::MemRead: {
        const ImageBuf& in = fetch(task.reads[0]);
        for (const auto& ref : task.writes) store(ref) = in;
        break;
      }
      case TaskKind::MemWrite: {
        store(task.writes[0]) = fetch(task.reads[0]);
        break;
      }
    }
  }

  for (size_t i = 0; i < program.images.size(); ++i)
    if (program.images[i].binding == ImageBinding::HostOutput)
      result.outputs[program.images[i].name] = std::move(image_values[i]);
  return result;
}

// ---------------------------------------------------------------------------
// Streaming executor. Each task is a token automaton with initiation
// interval 1; stencils buffer rows and lag by their pipeline fill.
// ---------------------------------------------------------------------------

namespace {

struct Fifo {
  std::deque<int32_t> lanes;
  int64_t capacity_tokens = 0;  // 0 = unbounded
  int high_water = 0;

  int64_t tokens(int v) const { return int64_t(lanes.size()) / v; }
};

// One streaming task. The engine guarantees inputs are available and output
// space exists before calling step().
class TaskStream {
 public:
  TaskStream(const Program& program, int task_index)
      : program_(program),
        task_(program.tasks[task_index]),
        v_(program.vector_length),
        width_(program.width),
        height_(program.height) {
    total_tokens_ = int64_t(width_) * height_ / v_;
    if (task_.kind == TaskKind::Local) {
      mask_ = scale_mask(task_);
      int r = mask_.k / 2;
      lag_ = int64_t(r) * (width_ / v_) + r;
      row_store_.reserve(size_t(width_) * height_);
    }
  }

  const std::string& name() const { return task_.name; }
  bool finished() const { return emitted_ == total_tokens_; }
  bool wants_input() const { return consumed_ < total_tokens_; }

  // The pipeline emits its first token after `lag` steps and keeps flushing
  // one per step through the drain, mirroring the tokens+lag iteration count
  // of the generated streaming loop.
  bool will_emit() const {
    int64_t emittable = std::min(total_tokens_, std::max<int64_t>(0, steps_ + 1 - lag_));
    return emitted_ < emittable;
  }

  const std::vector<Ref>& reads() const { return task_.reads; }
  const std::vector<Ref>& writes() const { return task_.writes; }

  // in: one token per read operand (v lanes each); out: one token when
  // will_emit() held, broadcast by the engine to every write target.
  void step(const std::vector<const int32_t*>& in, std::vector<int32_t>& out) {
    bool emit = will_emit();
    if (wants_input()) consume(in);
    ++steps_;
    if (!emit) return;
    out.resize(v_);
    switch (task_.kind) {
      case TaskKind::Point:
        for (int j = 0; j < v_; ++j) out[j] = eval_expr(task_.expr, held_[0][j], 0);
        break;
      case TaskKind::Point2:
        for (int j = 0; j < v_; ++j) out[j] = eval_expr(task_.expr, held_[0][j], held_[1][j]);
        break;
      case TaskKind::Split:
      case TaskKind::MemRead:
      case TaskKind::MemWrite:
        for (int j = 0; j < v_; ++j) out[j] = held_[0][j];
        break;
      case TaskKind::Local: {
        int r = mask_.k / 2;
        for (int j = 0; j < v_; ++j) {
          int64_t q = emitted_ * v_ + j;
          int qx = int(q % width_), qy = int(q / width_);
          int64_t acc = 0;
          for (int wy = -r; wy <= r; ++wy) {
            int cy = clamp_i(qy + wy, 0, height_ - 1);
            for (int wx = -r; wx <= r; ++wx) {
              int cx = clamp_i(qx + wx, 0, width_ - 1);
              acc += mask_.coeff[size_t(wy + r) * mask_.k + (wx + r)] *
                     row_store_[size_t(cy) * width_ + cx];
            }
          }
          out[j] = wrap32(acc / mask_.denom);
        }
        break;
      }
    }
    ++emitted_;
  }

 private:
  void consume(const std::vector<const int32_t*>& in) {
    held_.resize(in.size());
    for (size_t op = 0; op < in.size(); ++op) {
      held_[op].assign(in[op], in[op] + v_);
      if (task_.kind == TaskKind::Local)
        row_store_.insert(row_store_.end(), in[op], in[op] + v_);
    }
    ++consumed_;
  }

  const Program& program_;
  const Task& task_;
  int v_, width_, height_;
  int64_t total_tokens_ = 0;
  int64_t lag_ = 0;
  int64_t steps_ = 0;
  int64_t consumed_ = 0;
  int64_t emitted_ = 0;
  ScaledMask mask_;
  std::vector<std::vector<int32_t>> held_;  // last consumed token per operand
  std::vector<int32_t> row_store_;          // Local: pixels seen so far
};

struct Endpoint {
  bool is_channel = false;
  int index = 0;  // fifo index or image index
};

class Engine {
 public:
  Engine(const Program& program, const std::map<std::string, ImageBuf>& inputs, bool bounded)
      : program_(program), v_(program.vector_length), bounded_(bounded) {
    fifos_.resize(program.channels.size());
    for (size_t c = 0; c < program.channels.size(); ++c)
      fifos_[c].capacity_tokens =
          bounded ? program.channels[c].depth.value_or(program.default_fifo_depth) : 0;

    image_values_.resize(program.images.size());
    image_cursor_.assign(program.images.size(), 0);
    for (size_t i = 0; i < program.images.size(); ++i) {
      const ImageDecl& img = program_.images[i];
      if (img.binding == ImageBinding::HostInput) {
        auto it = inputs.find(img.name);
        if (it == inputs.end()) {
          fail(SimStatus::MissingInput, "missing input image '" + img.name + "'");
          return;
        }
        if (it->second.width != program.width || it->second.height != program.height) {
          fail(SimStatus::DimMismatch, "input image '" + img.name + "' is " +
                                           std::to_string(it->second.width) + "x" +
                                           std::to_string(it->second.height) + ", expected " +
                                           std::to_string(program.width) + "x" +
                                           std::to_string(program.height));
          return;
        }
        image_values_[i] = it->second;
      } else {
        image_values_[i] = ImageBuf(program.width, program.height);
      }
    }

    for (size_t t = 0; t < program.tasks.size(); ++t)
      streams_.emplace_back(program, int(t));
  }

  bool failed() const { return status_ != SimStatus::Ok; }

  bool can_fire(const TaskStream& s) {
    if (s.finished()) return false;
    if (s.wants_input())
      for (const auto& ref : s.reads())
        if (ref.kind == Ref::Kind::Channel && fifos_[ref.index].tokens(v_) == 0) return false;
    if (s.will_emit())
      for (const auto& ref : s.writes())
        if (ref.kind == Ref::Kind::Channel) {
          const Fifo& f = fifos_[ref.index];
          if (f.capacity_tokens > 0 && f.tokens(v_) >= f.capacity_tokens) return false;
        }
    return true;
  }

  void fire(TaskStream& s) {
    std::vector<const int32_t*> in;
    std::vector<std::vector<int32_t>> popped(s.reads().size());
    if (s.wants_input()) {
      for (size_t op = 0; op < s.reads().size(); ++op) {
        const Ref& ref = s.reads()[op];
        if (ref.kind == Ref::Kind::Channel) {
          Fifo& f = fifos_[ref.index];
          popped[op].assign(f.lanes.begin(), f.lanes.begin() + v_);
          f.lanes.erase(f.lanes.begin(), f.lanes.begin() + v_);
        } else {
          int64_t& cur = image_cursor_[ref.index];
          const auto& data = image_values_[ref.index].data;
          popped[op].assign(data.begin() + cur, data.begin() + cur + v_);
          cur += v_;
        }
        in.push_back(popped[op].data());
      }
    }
    std::vector<int32_t> out;
    bool emit = s.will_emit();
    s.step(in, out);
    if (!emit) return;
    for (const auto& ref : s.writes()) {
      if (ref.kind == Ref::Kind::Channel) {
        Fifo& f = fifos_[ref.index];
        f.lanes.insert(f.lanes.end(), out.begin(), out.end());
        f.high_water = std::max(f.high_water, int(f.tokens(v_)));
      } else {
        auto& data = image_values_[ref.index].data;
        int64_t& cur = writer_cursor_[ref.index];
        std::copy(out.begin(), out.end(), data.begin() + cur);
        cur += v_;
      }
    }
  }

  // Lockstep execution: within a cycle, consumers run before their
  // producers, so a pop frees space the same cycle while a push only
  // becomes visible the next one.
  SimResult run_dataflow_mode() {
    DataflowGraph graph = extract_graph(program_);
    std::vector<int> order = topo_sort(graph);
    std::vector<int> schedule;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
      schedule.push_back(graph.nodes[*it].task);

    writer_cursor_.assign(program_.images.size(), 0);
    int64_t cycle = 0, last_fire = -1;
    while (true) {
      bool all_done = true, fired = false;
      for (int t : schedule) {
        TaskStream& s = streams_[t];
        if (s.finished()) continue;
        all_done = false;
        if (!can_fire(s)) continue;
        fire(s);
        busy_[s.name()] += 1;
        fired = true;
        last_fire = cycle;
      }
      if (all_done) break;
      if (!fired) {
        SimResult r = collect();
        r.status = SimStatus::Deadlock;
        r.cycles = cycle;
        for (const auto& s : streams_)
          if (!s.finished()) r.blocked_tasks.push_back(s.name());
        r.error = "deadlock after " + std::to_string(cycle) + " cycles";
        return r;
      }
      ++cycle;
    }
    SimResult r = collect();
    r.cycles = last_fire < 0 ? 0 : last_fire + 2;  // final write lands a cycle after its fire
    return r;
  }

  // One task at a time over unbounded buffers; each task costs its solo
  // streaming latency (steps plus the landing cycle).
  SimResult run_sequential_mode() {
    DataflowGraph graph = extract_graph(program_);
    std::vector<int> order = topo_sort(graph);

    writer_cursor_.assign(program_.images.size(), 0);
    int64_t total_cycles = 0;
    for (int node : order) {
      TaskStream& s = streams_[graph.nodes[node].task];
      int64_t steps = 0;
      while (!s.finished()) {
        assert(can_fire(s));
        fire(s);
        ++steps;
      }
      busy_[s.name()] = steps;
      total_cycles += steps + 1;
    }
    SimResult r = collect();
    r.cycles = total_cycles;
    return r;
  }

  SimResult take_failure() {
    SimResult r;
    r.status = status_;
    r.error = error_;
    return r;
  }

 private:
  void fail(SimStatus status, std::string message) {
    status_ = status;
    error_ = std::move(message);
  }

  SimResult collect() {
    SimResult r;
    for (size_t i = 0; i < program_.images.size(); ++i)
      if (program_.images[i].binding == ImageBinding::HostOutput)
        r.outputs[program_.images[i].name] = image_values_[i];
    for (size_t c = 0; c < program_.channels.size(); ++c)
      r.fifo_high_water[program_.channels[c].name] = fifos_[c].high_water;
    r.per_task_busy = busy_;
    return r;
  }

  const Program& program_;
  int v_;
  bool bounded_;
  SimStatus status_ = SimStatus::Ok;
  std::string error_;
  std::vector<Fifo> fifos_;
  std::vector<ImageBuf> image_values_;
  std::vector<int64_t> image_cursor_;
  std::vector<int64_t> writer_cursor_;
  std::vector<TaskStream> streams_;
  std::map<std::string, int64_t> busy_;
};

}  // namespace

SimResult run_dataflow(const Program& program, const std::map<std::string, ImageBuf>& inputs,
                       SimMode mode) {
  Engine engine(program, inputs, mode == SimMode::Dataflow);
  if (engine.failed()) return engine.take_failure();
  return mode == SimMode::Dataflow ? engine.run_dataflow_mode()
                                   : engine.run_sequential_mode();
}

std::string SimResult::to_string() const {
  std::ostringstream out;
  for (const auto& [name, n] : per_task_busy) out << "task=" << name << " busy=" << n << '\n';
  for (const auto& [name, n] : fifo_high_water)
    out << "fifo=" << name << " high_water=" << n << '\n';
  out << "cycles=" << cycles << '\n';
  return out.str();
}

}  // namespace flower
