#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flower/driver.hpp"
#include "flower/emit.hpp"
#include "flower/latency.hpp"
#include "flower/pgm.hpp"
#include "flower/printer.hpp"
#include "flower/sim.hpp"

namespace fs = std::filesystem;
using namespace flower;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitIo = 2;

void print_diags(const Diagnostics& diags, const std::string& file) {
  std::cerr << diags.render(file, color_from_env());
}

std::optional<Program> load_or_fail(const std::string& path, int& exit_code) {
  Diagnostics diags;
  bool io_error = false;
  auto program = load_program_file(path, diags, &io_error);
  if (!program) {
    print_diags(diags, path);
    exit_code = io_error ? kExitIo : kExitDiagnostics;
    return std::nullopt;
  }
  if (!diags.empty()) print_diags(diags, path);  // warnings
  return program;
}

bool write_unit(const fs::path& dir, const EmittedUnit& unit) {
  fs::path path = dir / unit.file_name;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path.string() << "'\n";
    return false;
  }
  out << unit.source_text;
  out.close();
  std::cout << "wrote " << path.string() << " (" << unit.source_text.size() << " bytes)\n";
  return true;
}

struct CommonFlags {
  std::optional<int> vec;
  bool no_burst = false;
  bool gmem_opt = false;
  int banks = 4;
  std::optional<int> fifo_depth;
};

PipelineOptions pipeline_options(const CommonFlags& flags) {
  PipelineOptions opts;
  opts.vector_length = flags.vec;
  opts.burst = !flags.no_burst;
  opts.gmem_opt = flags.gmem_opt;
  opts.bank_count = flags.banks;
  opts.fifo_depth = flags.fifo_depth;
  return opts;
}

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--vec", flags.vec, "Vectorization factor (lanes per token)");
  cmd->add_flag("--no-burst", flags.no_burst, "Skip the burst read/compute/write split");
  cmd->add_flag("--gmem-opt", flags.gmem_opt, "One AXI bundle per global memory port");
  cmd->add_option("--banks", flags.banks, "Memory bank count for the link config")
      ->default_val(4);
  cmd->add_option("--fifo-depth", flags.fifo_depth,
                  "Default FIFO depth for channels without a depth attribute");
}

int cmd_compile(const std::string& input, const CommonFlags& flags, const std::string& target,
                const std::string& out_dir, const std::string& xclbin) {
  int exit_code = kExitOk;
  auto program = load_or_fail(input, exit_code);
  if (!program) return exit_code;

  Diagnostics diags;
  auto compiled = compile_pipeline(*program, pipeline_options(flags), diags);
  if (!compiled) {
    print_diags(diags, input);
    return kExitDiagnostics;
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << out_dir << "'\n";
    return kExitIo;
  }

  std::vector<EmittedUnit> units;
  if (target == "vitis-hls") {
    units.push_back(emit_top_kernel(compiled->ir, compiled->program));
    auto host = emit_host(compiled->ir, compiled->program, xclbin, diags);
    if (!host) {
      print_diags(diags, input);
      return kExitDiagnostics;
    }
    units.push_back(std::move(*host));
    LinkConfig link = assign_banks(compiled->ir, flags.banks);
    EmittedUnit cfg;
    cfg.file_name = "link.cfg";
    cfg.source_text = link.to_string();
    cfg.kind = UnitKind::LinkCfg;
    units.push_back(std::move(cfg));
  } else if (target == "xilinx-ocl" || target == "intel-ocl") {
    OclVendor vendor = target == "xilinx-ocl" ? OclVendor::Xilinx : OclVendor::Intel;
    std::string binary = vendor == OclVendor::Xilinx ? xclbin : "hls_top.aocx";
    auto kernel = emit_ocl_kernel(compiled->ir, compiled->program, vendor, diags);
    auto host = emit_ocl_host(compiled->ir, compiled->program, vendor, binary, diags);
    if (!kernel || !host) {
      print_diags(diags, input);
      return kExitDiagnostics;
    }
    units.push_back(std::move(*kernel));
    units.push_back(std::move(*host));
  } else {
    std::cerr << "error: unsupported target '" << target << "'\n";
    return kExitDiagnostics;
  }

  for (const auto& unit : units)
    if (!write_unit(out_dir, unit)) return kExitIo;
  return kExitOk;
}

int cmd_graph(const std::string& input, bool validate_only, const std::string& out_file) {
  int exit_code = kExitOk;
  auto program = load_or_fail(input, exit_code);
  if (!program) return exit_code;

  DataflowGraph graph = extract_graph(*program);
  ValidationReport report = validate(*program, graph);
  if (!report.ok()) {
    std::cerr << report.to_string();
    return kExitDiagnostics;
  }
  if (program->tasks.empty()) {
    std::cerr << input << ": error: no tasks\n";
    return kExitDiagnostics;
  }
  if (validate_only) {
    std::cout << report.to_string();  // surviving warnings
    std::cout << "ok\n";
    return kExitOk;
  }
  std::string dot = to_dot(*program, graph);
  if (out_file.empty()) {
    std::cout << dot;
  } else {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << out_file << "'\n";
      return kExitIo;
    }
    out << dot;
  }
  return kExitOk;
}

int cmd_estimate(const std::string& input, const CommonFlags& flags, const std::string& mode,
                 const std::vector<std::string>& override_args, int freq) {
  int exit_code = kExitOk;
  auto program = load_or_fail(input, exit_code);
  if (!program) return exit_code;

  Diagnostics diags;
  auto compiled = compile_pipeline(*program, pipeline_options(flags), diags);
  if (!compiled) {
    print_diags(diags, input);
    return kExitDiagnostics;
  }

  std::map<std::string, int64_t> overrides;
  for (const auto& arg : override_args) {
    auto eq = arg.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: override '" << arg << "' is not of the form task=cycles\n";
      return kExitDiagnostics;
    }
    std::string name = arg.substr(0, eq);
    bool known = false;
    for (const auto& task : compiled->ir.tasks) known |= task.source_name == name;
    if (!known) {
      std::cerr << "error: override names unknown task '" << name << "'\n";
      return kExitDiagnostics;
    }
    overrides[name] = std::stoll(arg.substr(eq + 1));
  }

  ScheduleMode schedule = mode == "sequential" ? ScheduleMode::Sequential
                          : mode == "dataflow" ? ScheduleMode::Dataflow
                                               : ScheduleMode::Both;
  LatencyReport report = estimate_kernel_latency(compiled->ir, schedule, overrides);
  report.frequency_mhz = freq;
  std::cout << report.to_string();
  return kExitOk;
}

int cmd_simulate(const std::string& input, const CommonFlags& flags, const std::string& mode,
                 bool check, const std::string& out_dir) {
  int exit_code = kExitOk;
  auto program = load_or_fail(input, exit_code);
  if (!program) return exit_code;

  Diagnostics diags;
  auto compiled = compile_pipeline(*program, pipeline_options(flags), diags);
  if (!compiled) {
    print_diags(diags, input);
    return kExitDiagnostics;
  }
  const Program& prog = compiled->program;

  // Input images load relative to the program file's directory.
  fs::path base = fs::path(input).parent_path();
  std::map<std::string, ImageBuf> inputs;
  for (const auto& img : prog.images) {
    if (img.binding != ImageBinding::HostInput) continue;
    fs::path path = fs::path(img.path).is_absolute() ? fs::path(img.path) : base / img.path;
    std::string error;
    auto buf = read_pgm(path.string(), &error);
    if (!buf) {
      std::cerr << "error: " << error << '\n';
      return kExitIo;
    }
    inputs[img.name] = std::move(*buf);
  }

  bool want_seq = mode == "sequential" || mode == "both";
  bool want_df = mode == "dataflow" || mode == "both";
  std::optional<SimResult> seq, df;
  auto run_mode = [&](SimMode m) -> std::optional<SimResult> {
    SimResult r = run_dataflow(prog, inputs, m);
    if (r.status != SimStatus::Ok) {
      std::cerr << "error: " << r.error << '\n';
      return std::nullopt;
    }
    return r;
  };
  if (want_seq) {
    seq = run_mode(SimMode::Sequential);
    if (!seq) return kExitDiagnostics;
    std::cout << "sequential=" << seq->cycles << '\n';
  }
  if (want_df) {
    df = run_mode(SimMode::Dataflow);
    if (!df) return kExitDiagnostics;
    std::cout << "dataflow=" << df->cycles << '\n';
  }

  const SimResult& outputs_from = df ? *df : *seq;
  if (check) {
    SimResult ref = run_reference(prog, inputs);
    if (ref.status != SimStatus::Ok) {
      std::cerr << "error: " << ref.error << '\n';
      return kExitDiagnostics;
    }
    for (const auto& [name, image] : ref.outputs) {
      auto check_one = [&](const SimResult& r, const char* label) {
        auto it = r.outputs.find(name);
        if (it == r.outputs.end() || it->second.data != image.data) {
          std::cerr << "error: " << label << " output '" << name
                    << "' differs from the reference interpretation\n";
          return false;
        }
        return true;
      };
      if (seq && !check_one(*seq, "sequential")) return kExitDiagnostics;
      if (df && !check_one(*df, "dataflow")) return kExitDiagnostics;
    }
    std::cout << "check=ok\n";
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << out_dir << "'\n";
    return kExitIo;
  }
  for (const auto& img : prog.images) {
    if (img.binding != ImageBinding::HostOutput) continue;
    auto it = outputs_from.outputs.find(img.name);
    if (it == outputs_from.outputs.end()) continue;
    fs::path path = fs::path(out_dir) / fs::path(img.path).filename();
    std::string error;
    if (!write_pgm(path.string(), it->second, &error)) {
      std::cerr << "error: " << error << '\n';
      return kExitIo;
    }
    std::cout << "wrote " << path.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flower: dataflow compiler for HLS kernels, host code, and OpenCL"};
  app.require_subcommand(1);

  std::string input, out_dir = ".", out_file, target = "vitis-hls";
  std::string mode_estimate = "both", mode_simulate = "both";
  std::string xclbin = "hls_top.xclbin";
  bool validate_only = false, check = false;
  int freq = 200;
  std::vector<std::string> overrides;
  CommonFlags compile_flags, estimate_flags, simulate_flags;

  CLI::App* compile = app.add_subcommand("compile", "Emit kernel, host, and link files");
  compile->add_option("input", input, "Program source (.flo)")->required();
  compile->add_option("--target", target, "vitis-hls, xilinx-ocl, or intel-ocl")
      ->check(CLI::IsMember({"vitis-hls", "xilinx-ocl", "intel-ocl"}));
  compile->add_option("-o,--out", out_dir, "Output directory")->default_val(".");
  compile->add_option("--xclbin", xclbin, "Bitstream path baked into the host");
  add_common_flags(compile, compile_flags);

  CLI::App* graph = app.add_subcommand("graph", "Print the dataflow graph as DOT");
  graph->add_option("input", input, "Program source (.flo)")->required();
  graph->add_flag("--validate-only", validate_only, "Run validation without printing DOT");
  graph->add_option("-o,--out", out_file, "Write DOT here instead of stdout");

  CLI::App* estimate = app.add_subcommand("estimate", "Analytic latency report");
  estimate->add_option("input", input, "Program source (.flo)")->required();
  estimate->add_option("--mode", mode_estimate, "sequential, dataflow, or both")
      ->check(CLI::IsMember({"sequential", "dataflow", "both"}));
  estimate->add_option("--override", overrides, "task=cycles latency override")
      ->take_all();
  estimate->add_option("--freq", freq, "Clock estimate in MHz (informational)");
  add_common_flags(estimate, estimate_flags);

  CLI::App* simulate = app.add_subcommand("simulate", "Run the bounded-FIFO executor");
  simulate->add_option("input", input, "Program source (.flo)")->required();
  simulate->add_option("--mode", mode_simulate, "sequential, dataflow, or both")
      ->check(CLI::IsMember({"sequential", "dataflow", "both"}));
  simulate->add_flag("--check", check, "Also run the reference interpreter and compare");
  simulate->add_option("-o,--out", out_dir, "Directory for output images")->default_val(".");
  add_common_flags(simulate, simulate_flags);

  CLI11_PARSE(app, argc, argv);

  if (compile->parsed()) return cmd_compile(input, compile_flags, target, out_dir, xclbin);
  if (graph->parsed()) return cmd_graph(input, validate_only, out_file);
  if (estimate->parsed())
    return cmd_estimate(input, estimate_flags, mode_estimate, overrides, freq);
  if (simulate->parsed()) return cmd_simulate(input, simulate_flags, mode_simulate, check, out_dir);
  return kExitOk;
}
