#include <gtest/gtest.h>

#include "flower/latency.hpp"
#include "support/test_util.hpp"

using namespace flower;
using flower::test::compile_or_throw;
using flower::test::load_corpus;
using flower::test::parse_and_resolve;

namespace {

PipelineOptions no_burst() {
  PipelineOptions opt;
  opt.burst = false;
  return opt;
}

}  // namespace

TEST(KernelIr, DiamondNamingAndInterfaces) {
  PipelineOptions opt = no_burst();
  CompiledProgram c = compile_or_throw(load_corpus("diamond"), opt);
  const KernelIR& ir = c.ir;
  ASSERT_EQ(ir.tasks.size(), 4u);
  EXPECT_EQ(ir.tasks[0].ir_name, "task1");
  EXPECT_EQ(ir.tasks[0].source_name, "split_in");
  EXPECT_EQ(ir.tasks[3].ir_name, "task4");
  EXPECT_EQ(ir.tasks[3].source_name, "fun3");
  ASSERT_EQ(ir.channels.size(), 4u);
  for (const auto& chan : ir.channels) EXPECT_EQ(chan.depth, 2);
  ASSERT_EQ(ir.interfaces.size(), 2u);
  EXPECT_EQ(ir.interfaces[0].port_name, "input_data");
  EXPECT_EQ(ir.interfaces[1].port_name, "output_data");
  EXPECT_EQ(ir.interfaces[0].bundle, "gmem0");
  EXPECT_EQ(ir.interfaces[1].bundle, "gmem0");
  EXPECT_EQ(ir.interfaces[0].bus_width_bits, 128);  // v=4
  EXPECT_EQ(ir.vector_length, 4);
  EXPECT_EQ(ir.tokens(), 16);
}

TEST(KernelIr, SingleStageAfterBurstHasThreeTasks) {
  CompiledProgram c = compile_or_throw(load_corpus("gaussian"));
  ASSERT_EQ(c.ir.tasks.size(), 3u);
  EXPECT_EQ(c.ir.tasks[0].kind, TaskKind::MemRead);
  EXPECT_EQ(c.ir.tasks[1].kind, TaskKind::Local);
  EXPECT_EQ(c.ir.tasks[2].kind, TaskKind::MemWrite);
}

TEST(KernelIr, EmptyProgramIsAnError) {
  Program p = parse_and_resolve("");
  Diagnostics diags;
  EXPECT_FALSE(compile_pipeline(p, {}, diags));
  EXPECT_NE(diags.render("x", false).find("no tasks"), std::string::npos);
}

TEST(KernelIr, TaskOrderIsTopological) {
  for (const char* name : {"diamond", "harris", "lucas_kanade", "unsharp_mask"}) {
    CompiledProgram c = compile_or_throw(load_corpus(name));
    std::map<std::string, size_t> position;
    for (size_t i = 0; i < c.ir.tasks.size(); ++i) position[c.ir.tasks[i].ir_name] = i;
    for (const auto& chan : c.ir.channels) {
      ASSERT_GE(chan.producer, 0) << name;
      ASSERT_GE(chan.consumer, 0) << name;
      EXPECT_LT(chan.producer, chan.consumer) << name << " channel " << chan.name;
    }
  }
}

// Frozen values from the analytic model: N = W*H/v, stencil fill
// floor(k/2)*(W/v) + ceil(k/2), L = N + d.
TEST(Latency, TaskModelFrozenValues) {
  TaskLatency gauss = estimate_task_latency(TaskKind::Local, 5, 1024, 1024, 1);
  EXPECT_EQ(gauss.fill, 2051);
  EXPECT_EQ(gauss.total, 1050627);

  TaskLatency point = estimate_task_latency(TaskKind::Point, 0, 1024, 1024, 1);
  EXPECT_EQ(point.fill, 1);
  EXPECT_EQ(point.total, 1048577);

  TaskLatency sobel_v4 = estimate_task_latency(TaskKind::Local, 3, 1024, 1024, 4);
  EXPECT_EQ(sobel_v4.fill, 258);
  EXPECT_EQ(sobel_v4.total, 262402);

  TaskLatency read = estimate_task_latency(TaskKind::MemRead, 0, 1024, 1024, 1);
  EXPECT_EQ(read.fill, 1);
}

TEST(Latency, FigureOneOverrides) {
  PipelineOptions opt = no_burst();
  CompiledProgram c = compile_or_throw(load_corpus("fig1_parallel"), opt);
  std::map<std::string, int64_t> overrides = {{"t1", 1048576},
                                              {"t2", 1050632},
                                              {"t3", 1050632},
                                              {"t4", 1050632},
                                              {"t5", 1048577}};
  LatencyReport report = estimate_kernel_latency(c.ir, ScheduleMode::Both, overrides);
  EXPECT_EQ(report.kernel_sequential, 5249049);
  EXPECT_EQ(report.kernel_dataflow, 1050632);
}

TEST(Latency, SingleTaskSequentialEqualsDataflow) {
  PipelineOptions opt = no_burst();
  CompiledProgram c = compile_or_throw(load_corpus("square"), opt);
  LatencyReport report = estimate_kernel_latency(c.ir, ScheduleMode::Both);
  EXPECT_EQ(report.kernel_sequential, report.kernel_dataflow);
}

TEST(Latency, BurstChainMatchesClosedForm) {
  CompiledProgram c = compile_or_throw(load_corpus("gaussian"));
  LatencyReport report = estimate_kernel_latency(c.ir, ScheduleMode::Both);
  // read(1) + local5(2051) + write(1) on top of N = 1048576
  EXPECT_EQ(report.kernel_dataflow, 1050629);
  EXPECT_EQ(report.kernel_sequential, 1048577 + 1050627 + 1048577);
}

TEST(Latency, DataflowNeverExceedsSequential) {
  for (const char* name : {"diamond", "gaussian", "filter_chain", "unsharp_mask", "harris",
                           "lucas_kanade", "fig1_parallel"}) {
    CompiledProgram c = compile_or_throw(load_corpus(name));
    LatencyReport report = estimate_kernel_latency(c.ir, ScheduleMode::Both);
    EXPECT_LE(report.kernel_dataflow, report.kernel_sequential) << name;
    EXPECT_GE(report.kernel_dataflow, 0) << name;
    if (c.ir.tasks.size() > 1)
      EXPECT_LT(report.kernel_dataflow, report.kernel_sequential) << name;
  }
}

TEST(Latency, EqualTaskSpeedupScalesWithTaskCount) {
  // m independent equal-latency tasks: sequential/dataflow >= m*(1-eps).
  for (int m = 2; m <= 8; ++m) {
    std::ostringstream src;
    for (int i = 0; i < m; ++i) {
      src << "image in" << i << "(64, 64) input \"i" << i << ".pgm\";\n";
      src << "image out" << i << "(64, 64) output \"o" << i << ".pgm\";\n";
    }
    for (int i = 0; i < m; ++i)
      src << "task t" << i << " point(pix + 1) reads in" << i << " writes out" << i << ";\n";
    PipelineOptions opt = no_burst();
    CompiledProgram c = compile_or_throw(parse_and_resolve(src.str()), opt);
    LatencyReport report = estimate_kernel_latency(c.ir, ScheduleMode::Both);
    double ratio = double(report.kernel_sequential) / double(report.kernel_dataflow);
    EXPECT_GE(ratio, m * 0.99) << m;
  }
}

TEST(Latency, DoublingVectorLengthHalvesTokens) {
  Program p = load_corpus("gaussian");
  for (int v : {1, 2, 4, 8}) {
    PipelineOptions opt;
    opt.vector_length = v;
    CompiledProgram c = compile_or_throw(p, opt);
    PipelineOptions opt2;
    opt2.vector_length = 2 * v;
    CompiledProgram c2 = compile_or_throw(p, opt2);
    EXPECT_EQ(c.ir.tokens(), 2 * c2.ir.tokens());

    // L(v) <= L(1)/v + d(v) + 1
    LatencyReport rv = estimate_kernel_latency(c2.ir, ScheduleMode::Dataflow);
    PipelineOptions opt1;
    opt1.vector_length = 1;
    CompiledProgram c1 = compile_or_throw(p, opt1);
    LatencyReport r1 = estimate_kernel_latency(c1.ir, ScheduleMode::Dataflow);
    int64_t fill = 0;
    for (const auto& t : rv.per_task) fill += t.fill;
    EXPECT_LE(rv.kernel_dataflow, r1.kernel_dataflow / (2 * v) + fill + 1);
  }
}

TEST(Latency, ReportFormat) {
  PipelineOptions opt = no_burst();
  CompiledProgram c = compile_or_throw(load_corpus("square"), opt);
  LatencyReport report = estimate_kernel_latency(c.ir, ScheduleMode::Both);
  EXPECT_EQ(report.to_string(),
            "task=square L=1048577 d=1\n"
            "sequential=1048577\n"
            "dataflow=1048577\n");

  LatencyReport seq_only = estimate_kernel_latency(c.ir, ScheduleMode::Sequential);
  EXPECT_EQ(seq_only.to_string(), "task=square L=1048577 d=1\nsequential=1048577\n");
}

TEST(Latency, OverrideBelowTokenCountClampsFillAtZero) {
  PipelineOptions opt = no_burst();
  CompiledProgram c = compile_or_throw(load_corpus("square"), opt);
  LatencyReport report =
      estimate_kernel_latency(c.ir, ScheduleMode::Both, {{"square", 100}});
  EXPECT_EQ(report.per_task[0].total, 100);
  EXPECT_EQ(report.per_task[0].fill, 0);
  EXPECT_EQ(report.kernel_dataflow, c.ir.tokens());
}
