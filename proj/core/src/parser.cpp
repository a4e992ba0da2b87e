#include "flower/parser.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace flower {
namespace {

enum class Tok {
  Ident,
  Int,
  String,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Equals,
  Plus,
  Minus,
  Star,
  Slash,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int64_t value = 0;
  SourceLoc loc;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::String: return "string";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Equals: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::End: return "end of file";
  }
  return "?";
}

class Lexer {
 public:
  Lexer(std::string_view src, Diagnostics& diags) : src_(src), diags_(diags) {}

  bool run(std::vector<Token>& out) {
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      SourceLoc loc{line_, col_};
      char c = src_[pos_];
      if (std::isalpha(uint8_t(c)) || c == '_') {
        size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(uint8_t(src_[pos_])) || src_[pos_] == '_'))
          advance();
        out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), 0, loc});
      } else if (std::isdigit(uint8_t(c))) {
        int64_t value = 0;
        size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(uint8_t(src_[pos_]))) {
          value = value * 10 + (src_[pos_] - '0');
          advance();
        }
        Token t{Tok::Int, std::string(src_.substr(start, pos_ - start)), value, loc};
        out.push_back(t);
      } else if (c == '"') {
        advance();
        std::string text;
        while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
          text += src_[pos_];
          advance();
        }
        if (pos_ >= src_.size() || src_[pos_] != '"') {
          diags_.error(loc, "unterminated string literal");
          return false;
        }
        advance();
        out.push_back({Tok::String, std::move(text), 0, loc});
      } else {
        Tok kind;
        switch (c) {
          case '(': kind = Tok::LParen; break;
          case ')': kind = Tok::RParen; break;
          case '[': kind = Tok::LBracket; break;
          case ']': kind = Tok::RBracket; break;
          case ',': kind = Tok::Comma; break;
          case ';': kind = Tok::Semi; break;
          case '=': kind = Tok::Equals; break;
          case '+': kind = Tok::Plus; break;
          case '-': kind = Tok::Minus; break;
          case '*': kind = Tok::Star; break;
          case '/': kind = Tok::Slash; break;
          default:
            diags_.error(loc, std::string("unexpected character '") + c + "'");
            return false;
        }
        out.push_back({kind, std::string(1, c), 0, loc});
        advance();
      }
    }
    out.push_back({Tok::End, "", 0, {line_, col_}});
    return true;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(uint8_t(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  Diagnostics& diags_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, Diagnostics& diags)
      : tokens_(std::move(tokens)), diags_(diags) {}

  std::optional<Ast> run() {
    Ast ast;
    while (!at(Tok::End)) {
      if (at_keyword("channel")) {
        if (!parse_channel(ast)) return std::nullopt;
      } else if (at_keyword("const")) {
        if (!parse_const(ast)) return std::nullopt;
      } else if (at_keyword("image")) {
        if (!parse_image(ast)) return std::nullopt;
      } else if (at_keyword("task")) {
        if (!parse_task(ast)) return std::nullopt;
      } else {
        error("expected 'channel', 'const', 'image', or 'task'");
        return std::nullopt;
      }
    }
    return ast;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_keyword(const char* kw) const { return at(Tok::Ident) && peek().text == kw; }
  Token take() { return tokens_[pos_++]; }

  void error(const std::string& expected) {
    diags_.error(peek().loc, expected + ", found " +
                                 (peek().kind == Tok::Ident || peek().kind == Tok::Int
                                      ? "'" + peek().text + "'"
                                      : tok_name(peek().kind)));
  }

  bool expect(Tok kind, const char* what) {
    if (!at(kind)) {
      error(std::string("expected ") + tok_name(kind) + " " + what);
      return false;
    }
    take();
    return true;
  }

  bool expect_keyword(const char* kw) {
    if (!at_keyword(kw)) {
      error(std::string("expected '") + kw + "'");
      return false;
    }
    take();
    return true;
  }

  bool parse_ident(std::string& out, const char* what) {
    if (!at(Tok::Ident)) {
      error(std::string("expected identifier ") + what);
      return false;
    }
    out = take().text;
    return true;
  }

  bool parse_int(int64_t& out, const char* what) {
    bool neg = false;
    if (at(Tok::Minus)) {
      take();
      neg = true;
    }
    if (!at(Tok::Int)) {
      error(std::string("expected integer ") + what);
      return false;
    }
    out = take().value;
    if (neg) out = -out;
    return true;
  }

  bool parse_channel(Ast& ast) {
    ChannelDecl decl;
    decl.loc = take().loc;  // 'channel'
    if (!parse_ident(decl.name, "after 'channel'")) return false;
    if (at_keyword("depth")) {
      take();
      int64_t depth = 0;
      if (!parse_int(depth, "after 'depth'")) return false;
      decl.depth = int(depth);
    }
    if (!expect(Tok::Semi, "after channel declaration")) return false;
    ast.channels.push_back(std::move(decl));
    return true;
  }

  bool parse_const(Ast& ast) {
    SourceLoc loc = take().loc;  // 'const'
    if (!expect_keyword("vector_length")) return false;
    if (!expect(Tok::Equals, "after 'vector_length'")) return false;
    int64_t v = 0;
    if (!parse_int(v, "for vector_length")) return false;
    if (!expect(Tok::Semi, "after constant declaration")) return false;
    if (ast.vector_length) {
      diags_.error(loc, "vector_length declared twice");
      return false;
    }
    ast.vector_length = int(v);
    ast.vector_length_loc = loc;
    return true;
  }

  bool parse_image(Ast& ast) {
    ImageDecl decl;
    decl.loc = take().loc;  // 'image'
    if (!parse_ident(decl.name, "after 'image'")) return false;
    if (!expect(Tok::LParen, "before image size")) return false;
    int64_t w = 0, h = 0;
    if (!parse_int(w, "for image width")) return false;
    if (!expect(Tok::Comma, "between width and height")) return false;
    if (!parse_int(h, "for image height")) return false;
    if (!expect(Tok::RParen, "after image size")) return false;
    decl.width = int(w);
    decl.height = int(h);
    if (at_keyword("input")) {
      take();
      decl.binding = ImageBinding::HostInput;
      if (!at(Tok::String)) {
        error("expected path string after 'input'");
        return false;
      }
      decl.path = take().text;
    } else if (at_keyword("output")) {
      take();
      decl.binding = ImageBinding::HostOutput;
      if (!at(Tok::String)) {
        error("expected path string after 'output'");
        return false;
      }
      decl.path = take().text;
    } else if (at_keyword("virtual")) {
      take();
      decl.binding = ImageBinding::Virtual;
      if (!parse_ident(decl.channel, "after 'virtual'")) return false;
    } else {
      error("expected 'input', 'output', or 'virtual'");
      return false;
    }
    if (!expect(Tok::Semi, "after image declaration")) return false;
    ast.images.push_back(std::move(decl));
    return true;
  }

  bool parse_task(Ast& ast) {
    TaskDecl decl;
    decl.loc = take().loc;  // 'task'
    if (!parse_ident(decl.name, "after 'task'")) return false;
    if (at_keyword("point")) {
      take();
      decl.kind = TaskKind::Point;
      if (!expect(Tok::LParen, "before point expression")) return false;
      if (!parse_expr(decl.expr)) return false;
      if (!expect(Tok::RParen, "after point expression")) return false;
    } else if (at_keyword("point2")) {
      take();
      decl.kind = TaskKind::Point2;
      if (!expect(Tok::LParen, "before point2 expression")) return false;
      if (!parse_expr(decl.expr)) return false;
      if (!expect(Tok::RParen, "after point2 expression")) return false;
    } else if (at_keyword("local")) {
      take();
      decl.kind = TaskKind::Local;
      if (!expect(Tok::LParen, "before stencil size")) return false;
      int64_t k = 0;
      if (!parse_int(k, "for stencil size")) return false;
      decl.stencil_k = int(k);
      if (!expect(Tok::Comma, "between stencil size and mask")) return false;
      if (!parse_mask(decl)) return false;
      if (!expect(Tok::RParen, "after stencil mask")) return false;
    } else if (at_keyword("split")) {
      take();
      decl.kind = TaskKind::Split;
      if (at(Tok::LParen)) {
        take();
        int64_t n = 0;
        if (!parse_int(n, "for split fan-out")) return false;
        decl.split_count = int(n);
        if (!expect(Tok::RParen, "after split fan-out")) return false;
      }
    } else {
      error("expected task kind 'point', 'point2', 'local', or 'split'");
      return false;
    }
    if (!expect_keyword("reads")) return false;
    if (!parse_ref_list(decl.reads)) return false;
    if (!expect_keyword("writes")) return false;
    if (!parse_ref_list(decl.writes)) return false;
    if (!expect(Tok::Semi, "after task declaration")) return false;
    ast.tasks.push_back(std::move(decl));
    return true;
  }

  bool parse_ref_list(std::vector<std::string>& out) {
    std::string name;
    if (!parse_ident(name, "in reference list")) return false;
    out.push_back(std::move(name));
    while (at(Tok::Comma)) {
      take();
      if (!parse_ident(name, "in reference list")) return false;
      out.push_back(std::move(name));
    }
    return true;
  }

  bool parse_mask(TaskDecl& decl) {
    if (!expect(Tok::LBracket, "to open stencil mask")) return false;
    while (true) {
      Rational coeff;
      if (!parse_int(coeff.num, "for mask coefficient")) return false;
      if (at(Tok::Slash)) {
        take();
        if (!parse_int(coeff.den, "for coefficient denominator")) return false;
      }
      decl.mask.push_back(coeff);
      if (at(Tok::Comma) || at(Tok::Semi)) {
        take();  // row-major, ';' is only a visual row break
        continue;
      }
      break;
    }
    if (!expect(Tok::RBracket, "to close stencil mask")) return false;
    if (at(Tok::Slash)) {
      take();
      if (!parse_int(decl.mask_divisor, "for mask divisor")) return false;
    }
    return true;
  }

  // expr = term { (+|-) term } ; term = factor { (*|/) factor }
  bool parse_expr(Expr& out) {
    if (!parse_term(out)) return false;
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Expr::Kind kind = at(Tok::Plus) ? Expr::Kind::Add : Expr::Kind::Sub;
      SourceLoc loc = take().loc;
      Expr rhs;
      if (!parse_term(rhs)) return false;
      out = Expr::make(kind, {std::move(out), std::move(rhs)});
      out.loc = loc;
    }
    return true;
  }

  bool parse_term(Expr& out) {
    if (!parse_factor(out)) return false;
    while (at(Tok::Star) || at(Tok::Slash)) {
      Expr::Kind kind = at(Tok::Star) ? Expr::Kind::Mul : Expr::Kind::Div;
      SourceLoc loc = take().loc;
      Expr rhs;
      if (!parse_factor(rhs)) return false;
      out = Expr::make(kind, {std::move(out), std::move(rhs)});
      out.loc = loc;
    }
    return true;
  }

  bool parse_call(Expr& out, Expr::Kind kind, int arity) {
    SourceLoc loc = take().loc;  // function keyword
    if (!expect(Tok::LParen, "after function name")) return false;
    std::vector<Expr> args;
    for (int i = 0; i < arity; ++i) {
      if (i > 0 && !expect(Tok::Comma, "between arguments")) return false;
      Expr arg;
      if (!parse_expr(arg)) return false;
      args.push_back(std::move(arg));
    }
    if (!expect(Tok::RParen, "after arguments")) return false;
    out = Expr::make(kind, std::move(args));
    out.loc = loc;
    return true;
  }

  bool parse_factor(Expr& out) {
    SourceLoc loc = peek().loc;
    if (at(Tok::Int)) {
      out = Expr::literal(take().value);
      out.loc = loc;
      return true;
    }
    if (at(Tok::Minus)) {
      take();
      Expr inner;
      if (!parse_factor(inner)) return false;
      // fold -literal, otherwise 0 - x
      if (inner.kind == Expr::Kind::Literal) {
        out = Expr::literal(-inner.value);
      } else {
        out = Expr::make(Expr::Kind::Sub, {Expr::literal(0), std::move(inner)});
      }
      out.loc = loc;
      return true;
    }
    if (at(Tok::LParen)) {
      take();
      if (!parse_expr(out)) return false;
      return expect(Tok::RParen, "to close expression");
    }
    if (at_keyword("pix") || at_keyword("a")) {
      take();
      out = Expr::make_operand(0);
      out.loc = loc;
      return true;
    }
    if (at_keyword("b")) {
      take();
      out = Expr::make_operand(1);
      out.loc = loc;
      return true;
    }
    if (at_keyword("min")) return parse_call(out, Expr::Kind::Min, 2);
    if (at_keyword("max")) return parse_call(out, Expr::Kind::Max, 2);
    if (at_keyword("abs")) return parse_call(out, Expr::Kind::Abs, 1);
    if (at_keyword("clamp")) return parse_call(out, Expr::Kind::Clamp, 3);
    error("expected expression");
    return false;
  }

  std::vector<Token> tokens_;
  Diagnostics& diags_;
  size_t pos_ = 0;
};

}  // namespace

std::optional<Ast> parse_program(std::string_view source, Diagnostics& diags) {
  std::vector<Token> tokens;
  if (!Lexer(source, diags).run(tokens)) return std::nullopt;
  return Parser(std::move(tokens), diags).run();
}

}  // namespace flower
