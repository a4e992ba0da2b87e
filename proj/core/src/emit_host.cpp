#include <sstream>

#include "flower/emit.hpp"

namespace flower {

std::optional<EmittedUnit> emit_host(const KernelIR& ir, const Program& program,
                                     const std::string& xclbin_path, Diagnostics& diags) {
  if (ir.interfaces.empty()) {
    diags.error({}, "program has no global memory interface; nothing to drive from the host");
    return std::nullopt;
  }
  int64_t bytes = int64_t(ir.width) * ir.height * 4;
  std::ostringstream out;
  out << "// Generated by flower. Do not edit.\n";
  out << "#include <cstdio>\n";
  out << "#include <cstdlib>\n";
  out << "#include <string>\n";
  out << "#include <vector>\n";
  out << "\n";
  out << "#include \"xcl2.hpp\"\n";
  out << "\n";
  out << "static std::vector<int> load_pgm(const std::string& path, int width, int height) {\n";
  out << "    std::vector<int> data(size_t(width) * height);\n";
  out << "    FILE* f = fopen(path.c_str(), \"rb\");\n";
  out << "    if (!f) { fprintf(stderr, \"cannot open %s\\n\", path.c_str()); exit(1); }\n";
  out << "    int w = 0, h = 0, maxval = 0;\n";
  out << "    if (fscanf(f, \"P5 %d %d %d\", &w, &h, &maxval) != 3 || w != width || h != "
         "height) {\n";
  out << "        fprintf(stderr, \"bad PGM header in %s\\n\", path.c_str());\n";
  out << "        exit(1);\n";
  out << "    }\n";
  out << "    fgetc(f);\n";
  out << "    for (auto& px : data) px = fgetc(f);\n";
  out << "    fclose(f);\n";
  out << "    return data;\n";
  out << "}\n";
  out << "\n";
  out << "static void store_pgm(const std::string& path, const std::vector<int>& data, int "
         "width, int height) {\n";
  out << "    FILE* f = fopen(path.c_str(), \"wb\");\n";
  out << "    if (!f) { fprintf(stderr, \"cannot open %s\\n\", path.c_str()); exit(1); }\n";
  out << "    fprintf(f, \"P5\\n%d %d\\n255\\n\", width, height);\n";
  out << "    for (int px : data) fputc(px < 0 ? 0 : (px > 255 ? 255 : px), f);\n";
  out << "    fclose(f);\n";
  out << "}\n";
  out << "\n";
  out << "int main() {\n";
  out << "    auto device = xcl::get_devices()[0];\n";
  out << "    auto bitstream_buffer = xcl::read_binary_file(\"" << xclbin_path << "\");\n";
  out << "    cl::Program::Binaries bins{{bitstream_buffer.data(), "
         "bitstream_buffer.size()}};\n";
  out << "    auto context = cl::Context(device, NULL, NULL, NULL);\n";
  out << "    auto q = cl::CommandQueue(context, device, 0);\n";
  out << "\n";
  for (const auto& port : ir.interfaces)
    out << "    cl::Buffer buffer_" << port.port_name << "(context, CL_MEM_READ_WRITE, "
        << bytes << ");\n";
  out << "\n";
  for (const auto& port : ir.interfaces) {
    if (port.direction != PortDirection::Read) continue;
    out << "    auto " << port.port_name << " = load_pgm(\""
        << program.images[port.image].path << "\", " << ir.width << ", " << ir.height
        << ");\n";
    out << "    q.enqueueWriteBuffer(buffer_" << port.port_name << ", true, 0, " << bytes
        << ", " << port.port_name << ".data());\n";
  }
  out << "\n";
  out << "    cl::Program program(context, {device}, bins, NULL);\n";
  out << "    auto kernel = cl::Kernel(program, \"" << ir.kernel_name << "\");\n";
  for (size_t i = 0; i < ir.interfaces.size(); ++i)
    out << "    kernel.setArg(" << i << ", buffer_" << ir.interfaces[i].port_name << ");\n";
  out << "    q.enqueueTask(kernel);\n";
  out << "    q.finish();\n";
  out << "\n";
  for (const auto& port : ir.interfaces) {
    if (port.direction != PortDirection::Write) continue;
    out << "    std::vector<int> " << port.port_name << "(size_t(" << ir.width << ") * "
        << ir.height << ");\n";
    out << "    q.enqueueReadBuffer(buffer_" << port.port_name << ", true, 0, " << bytes
        << ", " << port.port_name << ".data());\n";
    out << "    store_pgm(\"" << program.images[port.image].path << "\", " << port.port_name
        << ", " << ir.width << ", " << ir.height << ");\n";
  }
  out << "    return 0;\n";
  out << "}\n";

  EmittedUnit unit;
  unit.file_name = "host.cpp";
  unit.source_text = out.str();
  unit.kind = UnitKind::Host;
  return unit;
}

}  // namespace flower
