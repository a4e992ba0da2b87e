#pragma once

#include <optional>
#include <string>

#include "flower/ast.hpp"
#include "flower/diagnostics.hpp"
#include "flower/kernel_ir.hpp"

namespace flower {

enum class UnitKind { HlsCpp, OclXilinx, OclIntel, Host, LinkCfg };

struct EmittedUnit {
  std::string file_name;
  std::string source_text;  // UTF-8, LF line endings
  UnitKind kind = UnitKind::HlsCpp;
};

/// Canonical Vitis HLS translation unit: vector/stream typedefs, task
/// forward declarations, the pragma-annotated top-level kernel, then the
/// task definitions. Byte-deterministic for a given IR.
EmittedUnit emit_top_kernel(const KernelIR& ir, const Program& program);

/// Single task function definition (used by emit_top_kernel; exposed for
/// tests). Streaming loops carry a PIPELINE II=1 pragma.
std::string emit_task(const KernelIR& ir, const Program& program, const TaskIR& task);

/// OpenCL/XRT host program driving the top-level kernel: one buffer per
/// global port, setArg in interface order, exactly one enqueueTask.
std::optional<EmittedUnit> emit_host(const KernelIR& ir, const Program& program,
                                     const std::string& xclbin_path, Diagnostics& diags);

enum class OclVendor { Xilinx, Intel };

/// Vendor-portable OpenCL: one __kernel per task, Intel channels or Xilinx
/// pipes between them. Xilinx pipe depths round up to the legal minimum 16.
std::optional<EmittedUnit> emit_ocl_kernel(const KernelIR& ir, const Program& program,
                                           OclVendor vendor, Diagnostics& diags);

std::optional<OclVendor> parse_ocl_vendor(const std::string& name);

/// Host program for the OpenCL backends: Xilinx enqueues every task kernel,
/// Intel enqueues the memory kernels and relies on autorun compute kernels.
std::optional<EmittedUnit> emit_ocl_host(const KernelIR& ir, const Program& program,
                                         OclVendor vendor, const std::string& binary_path,
                                         Diagnostics& diags);

}  // namespace flower
