#include <numeric>
#include <sstream>

#include "flower/emit.hpp"

namespace flower {
namespace {

// Xilinx OpenCL pipes require a power-of-two depth of at least 16.
int xilinx_pipe_depth(int depth) {
  int d = 16;
  while (d < depth) d *= 2;
  return d;
}

std::string ocl_vec_type(int v) { return v > 1 ? "int" + std::to_string(v) : "int"; }

// OpenCL vector components are .s0...s9, .sa...sf.
std::string ocl_lane(const std::string& var, int v, int j) {
  if (v == 1) return var;
  const char* hex = "0123456789abcdef";
  return var + ".s" + hex[j];
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

void expr_to_ocl(std::ostringstream& out, const Expr& e, const std::string& op0,
                 const std::string& op1, int parent_prec, bool right_side) {
  switch (e.kind) {
    case Expr::Kind::Literal: out << e.value; return;
    case Expr::Kind::Operand: out << (e.operand == 0 ? op0 : op1); return;
    case Expr::Kind::Min:
    case Expr::Kind::Max:
    case Expr::Kind::Abs:
    case Expr::Kind::Clamp: {
      // Built-in integer functions; abs returns unsigned in OpenCL C.
      const char* name = e.kind == Expr::Kind::Min   ? "min"
                         : e.kind == Expr::Kind::Max ? "max"
                         : e.kind == Expr::Kind::Abs ? "(int)abs"
                                                     : "clamp";
      out << name << '(';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out << ", ";
        expr_to_ocl(out, e.args[i], op0, op1, 0, false);
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
  expr_to_ocl(out, e.args[0], op0, op1, prec, false);
  out << op;
  expr_to_ocl(out, e.args[1], op0, op1, prec, true);
  if (parens) out << ')';
}

std::string ocl_expr(const Expr& e, const std::string& op0, const std::string& op1) {
  std::ostringstream out;
  expr_to_ocl(out, e, op0, op1, 0, false);
  return out.str();
}

struct Ports {
  std::vector<const InterfaceDesc*> globals;
  std::vector<const ChannelSpec*> ins;
  std::vector<const ChannelSpec*> outs;
};

Ports ports_of(const KernelIR& ir, const TaskIR& task) {
  Ports p;
  for (int g : task.global_ports) p.globals.push_back(&ir.interfaces[g]);
  for (int c : task.in_channels) p.ins.push_back(&ir.channels[c]);
  for (int c : task.out_channels) p.outs.push_back(&ir.channels[c]);
  return p;
}

void emit_channel_write(std::ostringstream& out, OclVendor vendor, const std::string& chan,
                        const std::string& var, const std::string& indent) {
  if (vendor == OclVendor::Intel)
    out << indent << "write_channel_intel(" << chan << ", " << var << ");\n";
  else
    out << indent << "write_pipe_block(" << chan << ", &" << var << ");\n";
}

void emit_channel_read(std::ostringstream& out, OclVendor vendor, const std::string& chan,
                       const std::string& type, const std::string& var,
                       const std::string& indent) {
  if (vendor == OclVendor::Intel)
    out << indent << type << ' ' << var << " = read_channel_intel(" << chan << ");\n";
  else
    out << indent << type << ' ' << var << ";\n"
        << indent << "read_pipe_block(" << chan << ", &" << var << ");\n";
}

void emit_memory_read(std::ostringstream& out, const std::string& port,
                      const std::string& type, const std::string& var, int v,
                      const std::string& indent) {
  if (v == 1) {
    out << indent << type << ' ' << var << " = " << port << "[i];\n";
  } else {
    out << indent << type << ' ' << var << ";\n";
    for (int j = 0; j < v; ++j)
      out << indent << ocl_lane(var, v, j) << " = " << port << "[i * " << v << " + " << j
          << "];\n";
  }
}

void emit_memory_write(std::ostringstream& out, const std::string& port,
                       const std::string& var, int v, const std::string& idx,
                       const std::string& indent) {
  if (v == 1) {
    out << indent << port << '[' << idx << "] = " << var << ";\n";
  } else {
    for (int j = 0; j < v; ++j)
      out << indent << port << '[' << idx << " * " << v << " + " << j
          << "] = " << ocl_lane(var, v, j) << ";\n";
  }
}

bool is_autorun(const TaskIR& task) { return task.global_ports.empty(); }

}  // namespace

std::optional<OclVendor> parse_ocl_vendor(const std::string& name) {
  if (name == "xilinx") return OclVendor::Xilinx;
  if (name == "intel") return OclVendor::Intel;
  return std::nullopt;
}

std::optional<EmittedUnit> emit_ocl_kernel(const KernelIR& ir, const Program& program,
                                           OclVendor vendor, Diagnostics& diags) {
  (void)diags;
  int v = ir.vector_length;
  int64_t tokens = ir.tokens();
  std::string vt = ocl_vec_type(v);
  std::ostringstream out;
  out << "// Generated by flower. Do not edit.\n";
  if (vendor == OclVendor::Intel) {
    out << "#pragma OPENCL EXTENSION cl_intel_channels : enable\n";
    out << "\n";
    for (const auto& chan : ir.channels)
      out << "channel " << vt << ' ' << chan.name << " __attribute__((depth(" << chan.depth
          << ")));\n";
  } else {
    out << "\n";
    for (const auto& chan : ir.channels)
      out << "pipe " << vt << ' ' << chan.name << " __attribute__((xcl_reqd_pipe_depth("
          << xilinx_pipe_depth(chan.depth) << ")));\n";
  }

  for (const auto& task : ir.tasks) {
    const Task& t = program.tasks[task.task];
    Ports p = ports_of(ir, task);
    out << "\n";
    if (vendor == OclVendor::Intel) {
      out << "__attribute__((max_global_work_dim(0)))\n";
      if (is_autorun(task)) out << "__attribute__((autorun))\n";
    }
    out << "__kernel void " << task.ir_name << '(';
    for (size_t i = 0; i < p.globals.size(); ++i) {
      if (i) out << ", ";
      out << "__global " << (p.globals[i]->direction == PortDirection::Read ? "const " : "")
          << "int* restrict " << p.globals[i]->port_name;
    }
    out << ") {\n";

    bool intel_autorun = vendor == OclVendor::Intel && is_autorun(task);
    std::string indent = "    ";
    if (intel_autorun) {
      out << "    while (1) {\n";
      indent = "        ";
    }
    std::string inner = indent + "    ";

    auto read_operand = [&](size_t op_index, const std::string& var, size_t& chan_i,
                            size_t& mem_i) {
      const Ref& ref = t.reads[op_index];
      if (ref.kind == Ref::Kind::Channel)
        emit_channel_read(out, vendor, p.ins[chan_i++]->name, vt, var, inner);
      else
        emit_memory_read(out, p.globals[mem_i++]->port_name, vt, var, v, inner);
    };

    out << indent << "for (int i = 0; i < " << tokens << "; ++i) {\n";
    size_t chan_i = 0, mem_i = 0;
    switch (task.kind) {
      case TaskKind::MemRead:
      case TaskKind::Split: {
        read_operand(0, "t", chan_i, mem_i);
        for (const auto* chan : p.outs) emit_channel_write(out, vendor, chan->name, "t", inner);
        for (size_t g = mem_i; g < p.globals.size(); ++g)
          if (p.globals[g]->direction == PortDirection::Write)
            emit_memory_write(out, p.globals[g]->port_name, "t", v, "i", inner);
        break;
      }
      case TaskKind::MemWrite: {
        read_operand(0, "t", chan_i, mem_i);
        emit_memory_write(out, p.globals.back()->port_name, "t", v, "i", inner);
        break;
      }
      case TaskKind::Point: {
        read_operand(0, "x", chan_i, mem_i);
        out << inner << vt << " y;\n";
        for (int j = 0; j < v; ++j)
          out << inner << ocl_lane("y", v, j) << " = "
              << ocl_expr(t.expr, ocl_lane("x", v, j), "0") << ";\n";
        if (!p.outs.empty())
          emit_channel_write(out, vendor, p.outs[0]->name, "y", inner);
        else
          emit_memory_write(out, p.globals.back()->port_name, "y", v, "i", inner);
        break;
      }
      case TaskKind::Point2: {
        read_operand(0, "a", chan_i, mem_i);
        read_operand(1, "b", chan_i, mem_i);
        out << inner << vt << " y;\n";
        for (int j = 0; j < v; ++j)
          out << inner << ocl_lane("y", v, j) << " = "
              << ocl_expr(t.expr, ocl_lane("a", v, j), ocl_lane("b", v, j)) << ";\n";
        if (!p.outs.empty())
          emit_channel_write(out, vendor, p.outs[0]->name, "y", inner);
        else
          emit_memory_write(out, p.globals.back()->port_name, "y", v, "i", inner);
        break;
      }
      case TaskKind::Local: {
        int w = ir.width, h = ir.height;
        int k = t.stencil_k, r = k / 2;
        int64_t lag = int64_t(r) * (w / v) + r;
        int ring = k + 1 + (r * v + v - 1 + w - 1) / w;
        int64_t denom = 1;
        for (const auto& c : t.mask) denom = std::lcm(denom, c.den);
        // window coefficients, scaled to a common denominator
        out << inner << "const long coef[" << k << "][" << k << "] = {";
        for (int y = 0; y < k; ++y) {
          out << (y ? ", {" : "{");
          for (int x = 0; x < k; ++x) {
            if (x) out << ", ";
            const Rational& c = t.mask[size_t(y) * k + x];
            out << c.num * (denom / c.den);
          }
          out << '}';
        }
        out << "};\n";
        out << inner << "int line_buf[" << ring << "][" << w << "];\n";
        out << inner << "for (int i2 = 0; i2 < " << (tokens + lag) << "; ++i2) {\n";
        std::string in2 = inner + "    ";
        out << in2 << "if (i2 < " << tokens << ") {\n";
        std::string in3 = in2 + "    ";
        {
          const Ref& ref = t.reads[0];
          if (ref.kind == Ref::Kind::Channel)
            emit_channel_read(out, vendor, p.ins[0]->name, vt, "t", in3);
          else {
            if (v == 1) {
              out << in3 << vt << " t = " << p.globals[0]->port_name << "[i2];\n";
            } else {
              out << in3 << vt << " t;\n";
              for (int j = 0; j < v; ++j)
                out << in3 << ocl_lane("t", v, j) << " = " << p.globals[0]->port_name
                    << "[i2 * " << v << " + " << j << "];\n";
            }
          }
        }
        for (int j = 0; j < v; ++j) {
          std::string px =
              v > 1 ? "(i2 * " + std::to_string(v) + " + " + std::to_string(j) + ")" : "i2";
          out << in3 << "line_buf[(" << px << " / " << w << ") % " << ring << "][" << px
              << " % " << w << "] = " << ocl_lane("t", v, j) << ";\n";
        }
        out << in2 << "}\n";
        out << in2 << "int o = i2 - " << lag << ";\n";
        out << in2 << "if (o >= 0) {\n";
        out << in3 << "int yl[" << v << "];\n";
        out << in3 << "for (int j = 0; j < " << v << "; ++j) {\n";
        std::string in4 = in3 + "    ";
        out << in4 << "int qidx = o * " << v << " + j;\n";
        out << in4 << "int qx = qidx % " << w << ";\n";
        out << in4 << "int qy = qidx / " << w << ";\n";
        out << in4 << "long acc = 0;\n";
        out << in4 << "for (int wy = -" << r << "; wy <= " << r << "; ++wy) {\n";
        out << in4 << "    int cy = clamp(qy + wy, 0, " << (h - 1) << ");\n";
        out << in4 << "    for (int wx = -" << r << "; wx <= " << r << "; ++wx) {\n";
        out << in4 << "        int cx = clamp(qx + wx, 0, " << (w - 1) << ");\n";
        out << in4 << "        acc += coef[wy + " << r << "][wx + " << r << "] * line_buf[cy % "
            << ring << "][cx];\n";
        out << in4 << "    }\n";
        out << in4 << "}\n";
        out << in4 << "yl[j] = (int)(acc / " << denom << ");\n";
        out << in3 << "}\n";
        out << in3 << vt << " y;\n";
        for (int j = 0; j < v; ++j)
          out << in3 << ocl_lane("y", v, j) << " = yl[" << j << "];\n";
        if (!p.outs.empty())
          emit_channel_write(out, vendor, p.outs[0]->name, "y", in3);
        else
          emit_memory_write(out, p.globals.back()->port_name, "y", v, "o", in3);
        out << in2 << "}\n";
        out << inner << "}\n";
        break;
      }
    }
    out << indent << "}\n";
    if (intel_autorun) out << "    }\n";
    out << "}\n";
  }

  EmittedUnit unit;
  unit.file_name = ir.kernel_name + ".cl";
  unit.source_text = out.str();
  unit.kind = vendor == OclVendor::Intel ? UnitKind::OclIntel : UnitKind::OclXilinx;
  return unit;
}

std::optional<EmittedUnit> emit_ocl_host(const KernelIR& ir, const Program& program,
                                         OclVendor vendor, const std::string& binary_path,
                                         Diagnostics& diags) {
  (void)program;
  if (ir.interfaces.empty()) {
    diags.error({}, "program has no global memory interface; nothing to drive from the host");
    return std::nullopt;
  }
  int64_t bytes = int64_t(ir.width) * ir.height * 4;
  std::ostringstream out;
  out << "// Generated by flower. Do not edit.\n";
  out << "#include <string>\n";
  out << "#include <vector>\n";
  out << "\n";
  out << "#include \"xcl2.hpp\"\n";
  out << "\n";
  out << "int main() {\n";
  out << "    auto device = xcl::get_devices()[0];\n";
  out << "    auto bitstream_buffer = xcl::read_binary_file(\"" << binary_path << "\");\n";
  out << "    cl::Program::Binaries bins{{bitstream_buffer.data(), "
         "bitstream_buffer.size()}};\n";
  out << "    auto context = cl::Context(device, NULL, NULL, NULL);\n";
  out << "    auto q = cl::CommandQueue(context, device, 0);\n";
  out << "    cl::Program program(context, {device}, bins, NULL);\n";
  out << "\n";
  for (const auto& port : ir.interfaces)
    out << "    cl::Buffer buffer_" << port.port_name << "(context, CL_MEM_READ_WRITE, "
        << bytes << ");\n";
  out << "\n";
  // Xilinx pipes do not autorun: every kernel is enqueued. Intel autorun
  // kernels start on their own; only memory kernels are launched.
  for (const auto& task : ir.tasks) {
    if (vendor == OclVendor::Intel && task.global_ports.empty()) continue;
    out << "    auto kernel_" << task.ir_name << " = cl::Kernel(program, \"" << task.ir_name
        << "\");\n";
    for (size_t a = 0; a < task.global_ports.size(); ++a)
      out << "    kernel_" << task.ir_name << ".setArg(" << a << ", buffer_"
          << ir.interfaces[task.global_ports[a]].port_name << ");\n";
    out << "    q.enqueueTask(kernel_" << task.ir_name << ");\n";
  }
  out << "    q.finish();\n";
  out << "    return 0;\n";
  out << "}\n";

  EmittedUnit unit;
  unit.file_name = "host.cpp";
  unit.source_text = out.str();
  unit.kind = UnitKind::Host;
  return unit;
}

}  // namespace flower
