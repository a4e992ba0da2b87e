#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flower/ast.hpp"
#include "flower/diagnostics.hpp"
#include "flower/kernel_ir.hpp"

namespace flower {

inline constexpr int kMaxBusWidthBits = 512;
inline constexpr int kMaxVectorLength = kMaxBusWidthBits / 32;

/// Widens every channel to v lanes and records v in the program. Tokens then
/// carry v adjacent pixels; functional semantics are unchanged. v must be a
/// power of two (bus widths are 32..512 bits) and divide the image width.
std::optional<Program> vectorize(const Program& program, int v, Diagnostics& diags);

/// Rewrites the program so compute tasks touch only channels: inserts one
/// memory-read task per consumed host input and one memory-write task per
/// produced host output. Idempotent.
Program burst_split(const Program& program);

/// Test/driver helper: rebinds every image to (width, height).
std::optional<Program> with_image_size(const Program& program, int width, int height,
                                       Diagnostics& diags);

/// gmem_opt off: every port on gmem0. On: port i gets its own gmem{i}.
KernelIR assign_bundles(KernelIR ir, bool gmem_opt);

struct LinkConfig {
  struct Entry {
    std::string instance;  // kernel instance, e.g. hls_top_1
    std::string port;
    int bank = 0;
  };
  std::vector<Entry> entries;
  bool overflowed = false;  // more ports than banks; assignment wrapped

  /// Vitis v++ connectivity text, bit-exact:
  ///   [connectivity]
  ///   sp=hls_top_1.input_data:DDR[0]
  std::string to_string() const;
};

/// Round-robin bank assignment over 0..bank_count-1 in port order.
LinkConfig assign_banks(const KernelIR& ir, int bank_count);

}  // namespace flower
