#include "flower/printer.hpp"

#include <sstream>

namespace flower {
namespace {

int precedence(Expr::Kind kind) {
  switch (kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    default: return 3;
  }
}

void print_expr_rec(std::ostringstream& out, const Expr& e, TaskKind task_kind, int parent_prec,
                    bool right_side) {
  int prec = precedence(e.kind);
  switch (e.kind) {
    case Expr::Kind::Literal: out << e.value; return;
    case Expr::Kind::Operand:
      if (task_kind == TaskKind::Point2)
        out << (e.operand == 0 ? "a" : "b");
      else
        out << "pix";
      return;
    case Expr::Kind::Min:
    case Expr::Kind::Max:
    case Expr::Kind::Abs:
    case Expr::Kind::Clamp: {
      const char* name = e.kind == Expr::Kind::Min   ? "min"
                         : e.kind == Expr::Kind::Max ? "max"
                         : e.kind == Expr::Kind::Abs ? "abs"
                                                     : "clamp";
      out << name << '(';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out << ", ";
        print_expr_rec(out, e.args[i], task_kind, 0, false);
      }
      out << ')';
      return;
    }
    default: break;
  }
  bool parens = prec < parent_prec || (prec == parent_prec && right_side);
  if (parens) out << '(';
  const char* op = e.kind == Expr::Kind::Add   ? " + "
                   : e.kind == Expr::Kind::Sub ? " - "
                   : e.kind == Expr::Kind::Mul ? " * "
                                               : " / ";
  print_expr_rec(out, e.args[0], task_kind, prec, false);
  out << op;
  print_expr_rec(out, e.args[1], task_kind, prec, true);
  if (parens) out << ')';
}

void print_refs(std::ostringstream& out, const std::vector<std::string>& refs) {
  for (size_t i = 0; i < refs.size(); ++i) {
    if (i) out << ", ";
    out << refs[i];
  }
}

}  // namespace

std::string print_expr(const Expr& expr, TaskKind kind) {
  std::ostringstream out;
  print_expr_rec(out, expr, kind, 0, false);
  return out.str();
}

std::string print_program(const Ast& ast) {
  std::ostringstream out;
  if (ast.vector_length) out << "const vector_length = " << *ast.vector_length << ";\n\n";
  for (const auto& c : ast.channels) {
    out << "channel " << c.name;
    if (c.depth) out << " depth " << *c.depth;
    out << ";\n";
  }
  if (!ast.channels.empty()) out << '\n';
  for (const auto& img : ast.images) {
    out << "image " << img.name << '(' << img.width << ", " << img.height << ") ";
    switch (img.binding) {
      case ImageBinding::HostInput: out << "input \"" << img.path << '"'; break;
      case ImageBinding::HostOutput: out << "output \"" << img.path << '"'; break;
      case ImageBinding::Virtual: out << "virtual " << img.channel; break;
    }
    out << ";\n";
  }
  if (!ast.images.empty()) out << '\n';
  for (const auto& t : ast.tasks) {
    out << "task " << t.name << ' ';
    switch (t.kind) {
      case TaskKind::Point:
        out << "point(" << print_expr(t.expr, t.kind) << ')';
        break;
      case TaskKind::Point2:
        out << "point2(" << print_expr(t.expr, t.kind) << ')';
        break;
      case TaskKind::Local: {
        out << "local(" << t.stencil_k << ", [";
        size_t per_row = t.stencil_k > 0 && t.mask.size() == size_t(t.stencil_k) * t.stencil_k
                             ? size_t(t.stencil_k)
                             : t.mask.size();
        for (size_t i = 0; i < t.mask.size(); ++i) {
          if (i) out << (i % per_row == 0 ? "; " : ", ");
          out << t.mask[i].num;
          if (t.mask[i].den != 1) out << '/' << t.mask[i].den;
        }
        out << ']';
        if (t.mask_divisor != 1) out << " / " << t.mask_divisor;
        out << ')';
        break;
      }
      case TaskKind::Split:
        out << "split";
        if (t.split_count) out << '(' << *t.split_count << ')';
        break;
      case TaskKind::MemRead:
      case TaskKind::MemWrite:
        break;  // not part of the surface language
    }
    out << " reads ";
    print_refs(out, t.reads);
    out << " writes ";
    print_refs(out, t.writes);
    out << ";\n";
  }
  return out.str();
}

}  // namespace flower
