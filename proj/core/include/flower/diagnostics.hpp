#pragma once

#include <string>
#include <vector>

namespace flower {

/// 1-based source position; line 0 means "no location".
struct SourceLoc {
  int line = 0;
  int col = 0;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceLoc loc;
  std::string message;
};

/// Accumulates parse/resolve/transform diagnostics. Rendering follows the
/// `file:line:col: error: message` convention; ANSI color is opt-in.
class Diagnostics {
 public:
  void error(SourceLoc loc, std::string message) {
    items_.push_back({Severity::Error, loc, std::move(message)});
  }
  void warning(SourceLoc loc, std::string message) {
    items_.push_back({Severity::Warning, loc, std::move(message)});
  }

  bool ok() const {
    for (const auto& d : items_)
      if (d.severity == Severity::Error) return false;
    return true;
  }
  bool empty() const { return items_.empty(); }
  size_t error_count() const {
    size_t n = 0;
    for (const auto& d : items_) n += d.severity == Severity::Error;
    return n;
  }

  const std::vector<Diagnostic>& items() const { return items_; }

  /// One line per diagnostic, trailing newline included when nonempty.
  std::string render(const std::string& file, bool color) const;

 private:
  std::vector<Diagnostic> items_;
};

/// Reads FLOWER_COLOR (0 or 1); defaults to false for non-interactive use.
bool color_from_env();

}  // namespace flower
