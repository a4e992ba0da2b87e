#include <numeric>
#include <sstream>

#include "flower/emit.hpp"

namespace flower {
namespace {

std::string vec_type(int v) { return v > 1 ? "int" + std::to_string(v) : "int"; }
std::string chan_type(int v) { return vec_type(v) + "_chan"; }

std::string lane(const std::string& var, int v, int j) {
  return v > 1 ? var + ".e[" + std::to_string(j) + "]" : var;
}

int precedence(Expr::Kind kind) {
  switch (kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    default: return 3;
  }
}

// C expression for one lane; operands map to the given lvalue strings.
void expr_to_c(std::ostringstream& out, const Expr& e, const std::string& op0,
               const std::string& op1, int parent_prec, bool right_side) {
  switch (e.kind) {
    case Expr::Kind::Literal: out << e.value; return;
    case Expr::Kind::Operand: out << (e.operand == 0 ? op0 : op1); return;
    case Expr::Kind::Min:
    case Expr::Kind::Max:
    case Expr::Kind::Abs:
    case Expr::Kind::Clamp: {
      const char* name = e.kind == Expr::Kind::Min   ? "flower_min"
                         : e.kind == Expr::Kind::Max ? "flower_max"
                         : e.kind == Expr::Kind::Abs ? "flower_abs"
                                                     : "flower_clamp";
      out << name << '(';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out << ", ";
        expr_to_c(out, e.args[i], op0, op1, 0, false);
      }
      out << ')';
      return;
    }
    default: break;
  }
  int prec = precedence(e.kind);
  bool parens = prec < parent_prec || (prec == parent_prec && right_side);
  if (parens) out << '(';
  const char* op = e.kind == Expr::Kind::Add   ? " + "
                   : e.kind == Expr::Kind::Sub ? " - "
                   : e.kind == Expr::Kind::Mul ? " * "
                                               : " / ";
  expr_to_c(out, e.args[0], op0, op1, prec, false);
  out << op;
  expr_to_c(out, e.args[1], op0, op1, prec, true);
  if (parens) out << ')';
}

std::string expr_lane(const Expr& e, const std::string& op0, const std::string& op1) {
  std::ostringstream out;
  expr_to_c(out, e, op0, op1, 0, false);
  return out.str();
}

bool expr_uses_helpers(const Expr& e) {
  if (e.kind == Expr::Kind::Min || e.kind == Expr::Kind::Max || e.kind == Expr::Kind::Abs ||
      e.kind == Expr::Kind::Clamp)
    return true;
  for (const auto& arg : e.args)
    if (expr_uses_helpers(arg)) return true;
  return false;
}

struct PortNames {
  std::vector<std::string> globals;   // parameter names, reads then writes
  std::vector<std::string> in_chans;  // operand order
  std::vector<std::string> out_chans;
};

PortNames port_names(const KernelIR& ir, const TaskIR& task) {
  PortNames names;
  for (int p : task.global_ports) names.globals.push_back(ir.interfaces[p].port_name);
  for (int c : task.in_channels) names.in_chans.push_back(ir.channels[c].name);
  for (int c : task.out_channels) names.out_chans.push_back(ir.channels[c].name);
  return names;
}

std::string signature(const KernelIR& ir, const Program& program, const TaskIR& task,
                      bool named) {
  const Program& prog = program;
  int extent = ir.tokens();
  std::string ct = chan_type(ir.vector_length);
  PortNames names = port_names(ir, task);
  std::ostringstream out;
  out << "void " << task.ir_name << '(';
  bool first = true;
  auto sep = [&] {
    if (!first) out << ", ";
    first = false;
  };
  for (size_t i = 0; i < names.globals.size(); ++i) {
    sep();
    if (named)
      out << "int " << names.globals[i] << '[' << extent << ']';
    else
      out << "int[" << extent << ']';
  }
  for (const auto& name : names.in_chans) {
    sep();
    out << ct << '*';
    if (named) out << ' ' << name;
  }
  for (const auto& name : names.out_chans) {
    sep();
    out << ct << '*';
    if (named) out << ' ' << name;
  }
  out << ')';
  (void)prog;
  return out.str();
}

// Per-operand token loads in the task's own read order; globals stream
// sequentially so bursts can be inferred.
struct OperandSource {
  bool memory = false;
  std::string name;  // parameter or channel
};

std::vector<OperandSource> read_sources(const KernelIR& ir, const Program& program,
                                        const TaskIR& task) {
  std::vector<OperandSource> sources;
  size_t next_chan = 0;
  size_t next_port = 0;
  for (const auto& ref : program.tasks[task.task].reads) {
    OperandSource src;
    if (ref.kind == Ref::Kind::Channel) {
      src.memory = false;
      src.name = ir.channels[task.in_channels[next_chan++]].name;
    } else {
      src.memory = true;
      src.name = ir.interfaces[task.global_ports[next_port++]].port_name;
    }
    sources.push_back(std::move(src));
  }
  return sources;
}

std::vector<OperandSource> write_sinks(const KernelIR& ir, const Program& program,
                                       const TaskIR& task) {
  std::vector<OperandSource> sinks;
  size_t next_chan = 0;
  // Write ports follow the read ports inside global_ports.
  size_t next_port = 0;
  for (const auto& ref : program.tasks[task.task].reads)
    if (ref.kind == Ref::Kind::Image) ++next_port;
  for (const auto& ref : program.tasks[task.task].writes) {
    OperandSource sink;
    if (ref.kind == Ref::Kind::Channel) {
      sink.memory = false;
      sink.name = ir.channels[task.out_channels[next_chan++]].name;
    } else {
      sink.memory = true;
      sink.name = ir.interfaces[task.global_ports[next_port++]].port_name;
    }
    sinks.push_back(std::move(sink));
  }
  return sinks;
}

void emit_memory_load(std::ostringstream& out, const std::string& var,
                      const OperandSource& src, int v) {
  std::string vt = vec_type(v);
  out << "        " << vt << ' ' << var << ";\n";
  if (v == 1) {
    out << "        " << var << " = " << src.name << "[i];\n";
  } else {
    for (int j = 0; j < v; ++j)
      out << "        " << lane(var, v, j) << " = " << src.name << "[i * " << v << " + " << j
          << "];\n";
  }
}

void emit_token_in(std::ostringstream& out, const std::string& var, const OperandSource& src,
                   int v) {
  if (src.memory) {
    emit_memory_load(out, var, src, v);
  } else {
    out << "        " << vec_type(v) << ' ' << var << " = " << src.name << "->read();\n";
  }
}

void emit_token_out(std::ostringstream& out, const std::string& var, const OperandSource& sink,
                    int v) {
  if (sink.memory) {
    if (v == 1) {
      out << "        " << sink.name << "[i] = " << var << ";\n";
    } else {
      for (int j = 0; j < v; ++j)
        out << "        " << sink.name << "[i * " << v << " + " << j
            << "] = " << lane(var, v, j) << ";\n";
    }
  } else {
    out << "        " << sink.name << "->write(" << var << ");\n";
  }
}

void emit_local_body(std::ostringstream& out, const KernelIR& ir, const Program& program,
                     const TaskIR& task, const OperandSource& src,
                     const OperandSource& sink) {
  const Task& t = program.tasks[task.task];
  int v = ir.vector_length;
  int w = ir.width, h = ir.height;
  int k = t.stencil_k, r = k / 2;
  int64_t tokens = ir.tokens();
  int64_t lag = int64_t(r) * (w / v) + r;
  int ring = k + 1 + (r * v + v - 1 + w - 1) / w;

  int64_t denom = 1;
  for (const auto& c : t.mask) denom = std::lcm(denom, c.den);

  std::string vt = vec_type(v);
  out << "    static int line_buf[" << ring << "][" << w << "];\n";
  out << "    for (int i = 0; i < " << (tokens + lag) << "; ++i) {\n";
  out << "#pragma HLS PIPELINE II=1\n";
  out << "        if (i < " << tokens << ") {\n";
  if (src.memory) {
    out << "            " << vt << " t;\n";
    if (v == 1) {
      out << "            t = " << src.name << "[i];\n";
    } else {
      for (int j = 0; j < v; ++j)
        out << "            " << lane("t", v, j) << " = " << src.name << "[i * " << v << " + "
            << j << "];\n";
    }
  } else {
    out << "            " << vt << " t = " << src.name << "->read();\n";
  }
  for (int j = 0; j < v; ++j) {
    std::string px = v > 1 ? "(i * " + std::to_string(v) + " + " + std::to_string(j) + ")"
                           : "i";
    out << "            line_buf[(" << px << " / " << w << ") % " << ring << "][" << px
        << " % " << w << "] = " << lane("t", v, j) << ";\n";
  }
  out << "        }\n";
  out << "        int o = i - " << lag << ";\n";
  out << "        if (o >= 0) {\n";
  out << "            " << vt << " y;\n";
  out << "            for (int j = 0; j < " << v << "; ++j) {\n";
  out << "#pragma HLS UNROLL\n";
  out << "                int q = o * " << v << " + j;\n";
  out << "                int qx = q % " << w << ";\n";
  out << "                int qy = q / " << w << ";\n";
  out << "                long long acc = 0;\n";
  out << "                for (int wy = -" << r << "; wy <= " << r << "; ++wy) {\n";
  out << "#pragma HLS UNROLL\n";
  out << "                    int cy = flower_clamp(qy + wy, 0, " << (h - 1) << ");\n";
  out << "                    for (int wx = -" << r << "; wx <= " << r << "; ++wx) {\n";
  out << "#pragma HLS UNROLL\n";
  out << "                        int cx = flower_clamp(qx + wx, 0, " << (w - 1) << ");\n";
  out << "                        acc += (long long)coef_" << task.ir_name
      << "[wy + " << r << "][wx + " << r << "] * line_buf[cy % " << ring << "][cx];\n";
  out << "                    }\n";
  out << "                }\n";
  out << "                " << (v > 1 ? "y.e[j]" : "y") << " = (int)(acc / " << denom
      << ");\n";
  out << "            }\n";
  if (sink.memory) {
    if (v == 1) {
      out << "            " << sink.name << "[o] = y;\n";
    } else {
      for (int j = 0; j < v; ++j)
        out << "            " << sink.name << "[o * " << v << " + " << j
            << "] = " << lane("y", v, j) << ";\n";
    }
  } else {
    out << "            " << sink.name << "->write(y);\n";
  }
  out << "        }\n";
  out << "    }\n";
}

std::string local_coef_table(const Program& program, const TaskIR& task) {
  const Task& t = program.tasks[task.task];
  int k = t.stencil_k;
  int64_t denom = 1;
  for (const auto& c : t.mask) denom = std::lcm(denom, c.den);
  std::ostringstream out;
  out << "static const long long coef_" << task.ir_name << "[" << k << "][" << k << "] = {\n";
  for (int y = 0; y < k; ++y) {
    out << "    {";
    for (int x = 0; x < k; ++x) {
      const Rational& c = t.mask[size_t(y) * k + x];
      if (x) out << ", ";
      out << c.num * (denom / c.den);
    }
    out << "},\n";
  }
  out << "};\n";
  return out.str();
}

}  // namespace

std::string emit_task(const KernelIR& ir, const Program& program, const TaskIR& task) {
  int v = ir.vector_length;
  int64_t tokens = ir.tokens();
  std::ostringstream out;

  if (task.kind == TaskKind::Local) out << local_coef_table(program, task);
  out << signature(ir, program, task, true) << " {\n";

  std::vector<OperandSource> sources = read_sources(ir, program, task);
  std::vector<OperandSource> sinks = write_sinks(ir, program, task);

  switch (task.kind) {
    case TaskKind::MemRead:
    case TaskKind::Split: {
      out << "    for (int i = 0; i < " << tokens << "; ++i) {\n";
      out << "#pragma HLS PIPELINE II=1\n";
      emit_token_in(out, "t", sources[0], v);
      for (const auto& sink : sinks) emit_token_out(out, "t", sink, v);
      out << "    }\n";
      break;
    }
    case TaskKind::MemWrite: {
      out << "    for (int i = 0; i < " << tokens << "; ++i) {\n";
      out << "#pragma HLS PIPELINE II=1\n";
      emit_token_in(out, "t", sources[0], v);
      emit_token_out(out, "t", sinks[0], v);
      out << "    }\n";
      break;
    }
    case TaskKind::Point: {
      out << "    for (int i = 0; i < " << tokens << "; ++i) {\n";
      out << "#pragma HLS PIPELINE II=1\n";
      emit_token_in(out, "x", sources[0], v);
      out << "        " << vec_type(v) << " y;\n";
      const Task& t = program.tasks[task.task];
      for (int j = 0; j < v; ++j)
        out << "        " << lane("y", v, j) << " = "
            << expr_lane(t.expr, lane("x", v, j), "0") << ";\n";
      emit_token_out(out, "y", sinks[0], v);
      out << "    }\n";
      break;
    }
    case TaskKind::Point2: {
      out << "    for (int i = 0; i < " << tokens << "; ++i) {\n";
      out << "#pragma HLS PIPELINE II=1\n";
      emit_token_in(out, "a", sources[0], v);
      emit_token_in(out, "b", sources[1], v);
      out << "        " << vec_type(v) << " y;\n";
      const Task& t = program.tasks[task.task];
      for (int j = 0; j < v; ++j)
        out << "        " << lane("y", v, j) << " = "
            << expr_lane(t.expr, lane("a", v, j), lane("b", v, j)) << ";\n";
      emit_token_out(out, "y", sinks[0], v);
      out << "    }\n";
      break;
    }
    case TaskKind::Local:
      emit_local_body(out, ir, program, task, sources[0], sinks[0]);
      break;
  }
  out << "}\n";
  return out.str();
}

EmittedUnit emit_top_kernel(const KernelIR& ir, const Program& program) {
  int v = ir.vector_length;
  std::ostringstream out;
  out << "// Generated by flower. Do not edit.\n";
  out << "#include \"hls_stream.h\"\n";
  out << "\n";
  if (v > 1) {
    out << "typedef struct { int e[" << v << "]; } " << vec_type(v) << ";\n";
  }
  out << "typedef hls::stream<" << vec_type(v) << "> " << chan_type(v) << ";\n";
  out << "\n";

  bool helpers = false;
  for (const auto& task : ir.tasks) {
    const Task& t = program.tasks[task.task];
    if (t.kind == TaskKind::Local) helpers = true;
    if ((t.kind == TaskKind::Point || t.kind == TaskKind::Point2) && expr_uses_helpers(t.expr))
      helpers = true;
  }
  if (helpers) {
    out << "static inline int flower_min(int a, int b) { return a < b ? a : b; }\n";
    out << "static inline int flower_max(int a, int b) { return a > b ? a : b; }\n";
    out << "static inline int flower_abs(int a) { return a < 0 ? -a : a; }\n";
    out << "static inline int flower_clamp(int x, int lo, int hi) { return x < lo ? lo : (x > "
           "hi ? hi : x); }\n";
    out << "\n";
  }

  for (const auto& task : ir.tasks) out << signature(ir, program, task, false) << ";\n";
  out << "\n";

  // Top-level kernel: interface pragmas, dataflow region, FIFO channels,
  // task calls in schedule order.
  out << "void " << ir.kernel_name << "(";
  for (size_t i = 0; i < ir.interfaces.size(); ++i) {
    if (i) out << ", ";
    out << "int " << ir.interfaces[i].port_name << '[' << ir.tokens() << ']';
  }
  out << ") {\n";
  for (const auto& port : ir.interfaces) {
    out << "#pragma HLS INTERFACE m_axi port = " << port.port_name
        << " bundle = " << port.bundle << " offset = slave\n";
    out << "#pragma HLS INTERFACE s_axilite port = " << port.port_name << "\n";
    out << "#pragma HLS STABLE variable = " << port.port_name << "\n";
  }
  out << "#pragma HLS INTERFACE ap_ctrl_chain port = return\n";
  out << "#pragma HLS top name = " << ir.kernel_name << "\n";
  out << "#pragma HLS DATAFLOW\n";
  out << "\n";

  if (!ir.channels.empty()) {
    out << "    " << chan_type(v) << ' ';
    for (size_t i = 0; i < ir.channels.size(); ++i) {
      if (i) out << ", ";
      out << ir.channels[i].name << "_slot";
    }
    out << ";\n";
    for (const auto& chan : ir.channels)
      out << "    " << chan_type(v) << "* " << chan.name << " = &" << chan.name << "_slot;\n";
    for (const auto& chan : ir.channels)
      out << "#pragma HLS STREAM variable = " << chan.name << " depth = " << chan.depth
          << "\n";
  }
  for (const auto& task : ir.tasks) {
    PortNames names = port_names(ir, task);
    out << "    " << task.ir_name << '(';
    bool first = true;
    auto sep = [&] {
      if (!first) out << ", ";
      first = false;
    };
    for (const auto& g : names.globals) {
      sep();
      out << g;
    }
    for (const auto& c : names.in_chans) {
      sep();
      out << c;
    }
    for (const auto& c : names.out_chans) {
      sep();
      out << c;
    }
    out << ");\n";
  }
  out << "}\n";

  for (const auto& task : ir.tasks) {
    out << "\n";
    out << emit_task(ir, program, task);
  }

  EmittedUnit unit;
  unit.file_name = ir.kernel_name + ".cpp";
  unit.source_text = out.str();
  unit.kind = UnitKind::HlsCpp;
  return unit;
}

}  // namespace flower
