#include "flower/resolver.hpp"

#include <map>
#include <numeric>
#include <string>

namespace flower {
namespace {

bool check_expr(const Expr& e, TaskKind kind, const std::string& task, Diagnostics& diags) {
  bool ok = true;
  if (e.kind == Expr::Kind::Operand && e.operand == 1 && kind != TaskKind::Point2) {
    diags.error(e.loc, "operand 'b' is only available in point2 tasks (task '" + task + "')");
    ok = false;
  }
  if (e.kind == Expr::Kind::Div && e.args[1].kind == Expr::Kind::Literal &&
      e.args[1].value == 0) {
    diags.error(e.loc, "division by literal zero in task '" + task + "'");
    ok = false;
  }
  for (const auto& arg : e.args) ok &= check_expr(arg, kind, task, diags);
  return ok;
}

Rational reduced(Rational r) {
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  int64_t g = std::gcd(r.num < 0 ? -r.num : r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

}  // namespace

std::optional<Program> resolve(const Ast& ast, Diagnostics& diags) {
  Program prog;
  bool ok = true;

  // One flat namespace for channels, images, and tasks.
  std::map<std::string, SourceLoc> names;
  auto declare = [&](const std::string& name, SourceLoc loc) {
    auto [it, inserted] = names.emplace(name, loc);
    if (!inserted) {
      diags.error(loc, "duplicate name '" + name + "'");
      ok = false;
    }
  };

  for (const auto& c : ast.channels) {
    declare(c.name, c.loc);
    if (c.depth && *c.depth < 2) {
      diags.error(c.loc, "channel '" + c.name + "' depth must be at least 2");
      ok = false;
    }
    prog.channels.push_back(c);
  }
  for (const auto& img : ast.images) {
    declare(img.name, img.loc);
    prog.images.push_back(img);
  }
  for (const auto& t : ast.tasks) declare(t.name, t.loc);

  // Shared image size.
  for (const auto& img : prog.images) {
    if (img.width <= 0 || img.height <= 0) {
      diags.error(img.loc, "image '" + img.name + "' must have a positive size");
      ok = false;
      continue;
    }
    if (prog.width == 0) {
      prog.width = img.width;
      prog.height = img.height;
    } else if (img.width != prog.width || img.height != prog.height) {
      diags.error(img.loc, "image '" + img.name + "' size differs from " +
                               std::to_string(prog.width) + "x" + std::to_string(prog.height) +
                               "; all images in a program share one size");
      ok = false;
    }
  }

  // Virtual images bind to exactly one declared channel.
  std::map<int, std::string> channel_owner;  // channel index -> virtual image
  std::map<std::string, int> virtual_channel;  // image name -> channel index
  for (const auto& img : prog.images) {
    if (img.binding != ImageBinding::Virtual) continue;
    int chan = prog.find_channel(img.channel);
    if (chan < 0) {
      diags.error(img.loc, "virtual image '" + img.name + "' references undeclared channel '" +
                               img.channel + "'");
      ok = false;
      continue;
    }
    auto [it, inserted] = channel_owner.emplace(chan, img.name);
    if (!inserted) {
      diags.error(img.loc, "channel '" + img.channel + "' is already bound to virtual image '" +
                               it->second + "'");
      ok = false;
      continue;
    }
    virtual_channel[img.name] = chan;
  }

  if (ast.vector_length) {
    if (*ast.vector_length < 1) {
      diags.error(ast.vector_length_loc, "vector_length must be positive");
      ok = false;
    } else {
      prog.vector_length = *ast.vector_length;
    }
  }

  auto resolve_ref = [&](const std::string& name, const TaskDecl& task,
                         std::optional<Ref>& out) {
    int chan = prog.find_channel(name);
    if (chan >= 0) {
      out = Ref{Ref::Kind::Channel, chan};
      return;
    }
    int img = prog.find_image(name);
    if (img >= 0) {
      auto vc = virtual_channel.find(name);
      if (vc != virtual_channel.end())
        out = Ref{Ref::Kind::Channel, vc->second};
      else
        out = Ref{Ref::Kind::Image, img};
      return;
    }
    diags.error(task.loc, "unbound name '" + name + "' in task '" + task.name + "'");
    ok = false;
  };

  for (const auto& decl : ast.tasks) {
    Task task;
    task.name = decl.name;
    task.kind = decl.kind;
    task.expr = decl.expr;
    task.stencil_k = decl.stencil_k;
    task.loc = decl.loc;

    for (const auto& name : decl.reads) {
      std::optional<Ref> ref;
      resolve_ref(name, decl, ref);
      if (ref) task.reads.push_back(*ref);
    }
    for (const auto& name : decl.writes) {
      std::optional<Ref> ref;
      resolve_ref(name, decl, ref);
      if (ref) task.writes.push_back(*ref);
    }

    auto arity_error = [&](const std::string& what) {
      diags.error(decl.loc, task_kind_name(decl.kind) + (" task '" + decl.name + "' ") + what);
      ok = false;
    };

    switch (decl.kind) {
      case TaskKind::Point:
        if (decl.reads.size() != 1) arity_error("must read exactly 1 input");
        if (decl.writes.size() != 1) arity_error("must write exactly 1 output");
        break;
      case TaskKind::Point2:
        if (decl.reads.size() != 2) arity_error("must read exactly 2 inputs");
        if (decl.writes.size() != 1) arity_error("must write exactly 1 output");
        break;
      case TaskKind::Local: {
        if (decl.reads.size() != 1) arity_error("must read exactly 1 input");
        if (decl.writes.size() != 1) arity_error("must write exactly 1 output");
        if (decl.stencil_k < 3 || decl.stencil_k % 2 == 0) {
          arity_error("stencil size must be odd and at least 3, got " +
                      std::to_string(decl.stencil_k));
          break;
        }
        size_t want = size_t(decl.stencil_k) * decl.stencil_k;
        if (decl.mask.size() != want) {
          arity_error("mask must have " + std::to_string(want) + " coefficients, got " +
                      std::to_string(decl.mask.size()));
          break;
        }
        if (decl.mask_divisor == 0) {
          arity_error("has a zero mask divisor");
          break;
        }
        for (const auto& coeff : decl.mask) {
          if (coeff.den == 0) {
            arity_error("has a zero coefficient denominator");
            break;
          }
          task.mask.push_back(reduced({coeff.num, coeff.den * decl.mask_divisor}));
        }
        break;
      }
      case TaskKind::Split:
        if (decl.reads.size() != 1) arity_error("must read exactly 1 input");
        if (decl.writes.size() < 2) arity_error("must write at least 2 outputs");
        if (decl.split_count && *decl.split_count != int(decl.writes.size()))
          arity_error("fan-out " + std::to_string(*decl.split_count) + " does not match " +
                      std::to_string(decl.writes.size()) + " writes");
        break;
      case TaskKind::MemRead:
      case TaskKind::MemWrite:
        arity_error("kind is reserved for the burst transform");
        break;
    }

    if (decl.kind == TaskKind::Point || decl.kind == TaskKind::Point2)
      if (!check_expr(decl.expr, decl.kind, decl.name, diags)) ok = false;

    // Host bindings are directional.
    for (const auto& ref : task.reads)
      if (ref.kind == Ref::Kind::Image &&
          prog.images[ref.index].binding == ImageBinding::HostOutput) {
        diags.error(decl.loc, "task '" + decl.name + "' reads host output image '" +
                                  prog.images[ref.index].name + "'");
        ok = false;
      }
    for (const auto& ref : task.writes)
      if (ref.kind == Ref::Kind::Image &&
          prog.images[ref.index].binding == ImageBinding::HostInput) {
        diags.error(decl.loc, "task '" + decl.name + "' writes host input image '" +
                                  prog.images[ref.index].name + "'");
        ok = false;
      }

    prog.tasks.push_back(std::move(task));
  }

  if (!ok) return std::nullopt;
  return prog;
}

}  // namespace flower
