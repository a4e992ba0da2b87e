#include "flower/diagnostics.hpp"

#include <cstdlib>
#include <sstream>

namespace flower {

std::string Diagnostics::render(const std::string& file, bool color) const {
  const char* kRed = color ? "\x1b[31m" : "";
  const char* kMagenta = color ? "\x1b[35m" : "";
  const char* kReset = color ? "\x1b[0m" : "";
  std::ostringstream out;
  for (const auto& d : items_) {
    out << file;
    if (d.loc.line > 0) out << ':' << d.loc.line << ':' << d.loc.col;
    if (d.severity == Severity::Error)
      out << ": " << kRed << "error" << kReset << ": ";
    else
      out << ": " << kMagenta << "warning" << kReset << ": ";
    out << d.message << '\n';
  }
  return out.str();
}

bool color_from_env() {
  const char* v = std::getenv("FLOWER_COLOR");
  return v != nullptr && v[0] == '1' && v[1] == '\0';
}

}  // namespace flower
