#include <gtest/gtest.h>

#include <random>
#include <set>

#include "flower/graph.hpp"
#include "flower/transform.hpp"
#include "support/test_util.hpp"

using namespace flower;
using flower::test::compile_or_throw;
using flower::test::load_corpus;
using flower::test::load_corpus_resized;
using flower::test::parse_and_resolve;
using flower::test::random_inputs;

TEST(Vectorize, SetsLaneCountOnEveryChannel) {
  Program p = load_corpus("diamond");
  Diagnostics diags;
  auto v4 = vectorize(p, 4, diags);
  ASSERT_TRUE(v4) << diags.render("x", false);
  EXPECT_EQ(v4->vector_length, 4);
  for (const auto& c : v4->channels) EXPECT_EQ(c.elem_width, 4);
}

TEST(Vectorize, IdentityAtOne) {
  Program p = load_corpus("gaussian");
  Diagnostics diags;
  auto v1 = vectorize(p, 1, diags);
  ASSERT_TRUE(v1);
  EXPECT_EQ(v1->vector_length, 1);
  for (const auto& c : v1->channels) EXPECT_EQ(c.elem_width, 1);
}

TEST(Vectorize, RejectsNonDividingFactor) {
  Program p = load_corpus("gaussian");  // width 1024
  Diagnostics diags;
  // 7 is rejected before the divisibility check as a non-power-of-two, so
  // probe divisibility with a width that defeats a legal factor instead.
  auto bad = with_image_size(p, 1020, 1020, diags);
  ASSERT_TRUE(bad);
  Diagnostics diags2;
  EXPECT_FALSE(vectorize(*bad, 8, diags2));
  EXPECT_NE(diags2.render("x", false).find("does not divide"), std::string::npos);
}

TEST(Vectorize, RejectsSevenOnPowerOfTwoWidth) {
  Program p = load_corpus("gaussian");
  Diagnostics diags;
  EXPECT_FALSE(vectorize(p, 7, diags));
}

TEST(Vectorize, RejectsBeyondBusWidth) {
  Program p = load_corpus("gaussian");
  Diagnostics diags;
  EXPECT_FALSE(vectorize(p, 32, diags));
  EXPECT_NE(diags.render("x", false).find("512"), std::string::npos);
}

TEST(Vectorize, PreservesReferenceSemantics) {
  std::mt19937 rng(42);
  for (const char* name : {"diamond", "gaussian", "filter_chain", "unsharp_mask", "harris"}) {
    Program p = load_corpus_resized(name, 16, 16);
    auto inputs = random_inputs(p, rng);
    SimResult base = run_reference(p, inputs);
    ASSERT_EQ(base.status, SimStatus::Ok);
    for (int v : {2, 4, 8}) {
      Diagnostics diags;
      auto pv = vectorize(p, v, diags);
      ASSERT_TRUE(pv) << name;
      SimResult vec = run_reference(*pv, inputs);
      ASSERT_EQ(vec.status, SimStatus::Ok);
      ASSERT_EQ(vec.outputs.size(), base.outputs.size());
      for (const auto& [img, buf] : base.outputs)
        EXPECT_EQ(vec.outputs.at(img).data, buf.data) << name << " v=" << v;
    }
  }
}

TEST(BurstSplit, SingleStageBecomesThreeTasks) {
  Program p = load_corpus("gaussian");
  Program split = burst_split(p);
  ASSERT_EQ(split.tasks.size(), 3u);
  EXPECT_EQ(split.tasks[0].kind, TaskKind::MemRead);
  EXPECT_EQ(split.tasks[1].kind, TaskKind::Local);
  EXPECT_EQ(split.tasks[2].kind, TaskKind::MemWrite);
  ValidationReport report = validate(split, extract_graph(split));
  EXPECT_TRUE(report.ok()) << report.to_string();
}

TEST(BurstSplit, DiamondBecomesSixTasksWithExpectedShape) {
  Program p = load_corpus("diamond");
  Program split = burst_split(p);
  ASSERT_EQ(split.tasks.size(), 6u);
  // Hand-derived shape: read -> split -> {fun1, fun2} -> fun3 -> write.
  DataflowGraph g = extract_graph(split);
  ValidationReport report = validate(split, g);
  ASSERT_TRUE(report.ok()) << report.to_string();
  int read_idx = split.find_task("read_in_img");
  int write_idx = split.find_task("write_out_img");
  ASSERT_GE(read_idx, 0);
  ASSERT_GE(write_idx, 0);
  EXPECT_EQ(split.tasks[read_idx].kind, TaskKind::MemRead);
  EXPECT_EQ(split.tasks[write_idx].kind, TaskKind::MemWrite);
  // the splitter now reads a channel fed by the reader
  const Task& splitter = split.tasks[split.find_task("split_in")];
  ASSERT_EQ(splitter.reads.size(), 1u);
  EXPECT_EQ(splitter.reads[0].kind, Ref::Kind::Channel);
  EXPECT_EQ(split.ref_name(splitter.reads[0]), split.ref_name(split.tasks[read_idx].writes[0]));
  const Task& fun3 = split.tasks[split.find_task("fun3")];
  EXPECT_EQ(fun3.writes[0].kind, Ref::Kind::Channel);
}

TEST(BurstSplit, Idempotent) {
  for (const char* name : {"diamond", "gaussian", "lucas_kanade"}) {
    Program once = burst_split(load_corpus(name));
    Program twice = burst_split(once);
    EXPECT_EQ(once.tasks.size(), twice.tasks.size()) << name;
    EXPECT_EQ(once.channels.size(), twice.channels.size()) << name;
    for (size_t i = 0; i < once.tasks.size(); ++i) {
      EXPECT_EQ(once.tasks[i].name, twice.tasks[i].name);
      EXPECT_EQ(once.tasks[i].reads, twice.tasks[i].reads);
      EXPECT_EQ(once.tasks[i].writes, twice.tasks[i].writes);
    }
  }
}

TEST(BurstSplit, ComputeTasksTouchOnlyChannels) {
  for (const char* name :
       {"diamond", "gaussian", "filter_chain", "unsharp_mask", "harris", "lucas_kanade"}) {
    Program split = burst_split(load_corpus(name));
    for (const auto& task : split.tasks) {
      if (task.kind == TaskKind::MemRead) {
        EXPECT_EQ(task.reads.size(), 1u);
        EXPECT_EQ(task.reads[0].kind, Ref::Kind::Image);
        for (const auto& w : task.writes) EXPECT_EQ(w.kind, Ref::Kind::Channel);
      } else if (task.kind == TaskKind::MemWrite) {
        EXPECT_EQ(task.writes.size(), 1u);
        EXPECT_EQ(task.writes[0].kind, Ref::Kind::Image);
        for (const auto& r : task.reads) EXPECT_EQ(r.kind, Ref::Kind::Channel);
      } else {
        for (const auto& r : task.reads) EXPECT_EQ(r.kind, Ref::Kind::Channel) << name;
        for (const auto& w : task.writes) EXPECT_EQ(w.kind, Ref::Kind::Channel) << name;
      }
    }
  }
}

TEST(BurstSplit, PreservesReferenceSemantics) {
  std::mt19937 rng(77);
  for (const char* name : {"diamond", "gaussian", "unsharp_mask", "lucas_kanade"}) {
    Program p = load_corpus_resized(name, 16, 16);
    auto inputs = random_inputs(p, rng);
    SimResult base = run_reference(p, inputs);
    SimResult split = run_reference(burst_split(p), inputs);
    ASSERT_EQ(base.status, SimStatus::Ok);
    ASSERT_EQ(split.status, SimStatus::Ok);
    for (const auto& [img, buf] : base.outputs)
      EXPECT_EQ(split.outputs.at(img).data, buf.data) << name;
  }
}

TEST(Bundles, SharedByDefaultDistinctWithGmemOpt) {
  Program p = load_corpus("diamond");
  CompiledProgram shared = compile_or_throw(p);
  ASSERT_EQ(shared.ir.interfaces.size(), 2u);
  for (const auto& port : shared.ir.interfaces) EXPECT_EQ(port.bundle, "gmem0");

  PipelineOptions opt;
  opt.gmem_opt = true;
  CompiledProgram split = compile_or_throw(p, opt);
  std::set<std::string> bundles;
  for (const auto& port : split.ir.interfaces) bundles.insert(port.bundle);
  EXPECT_EQ(bundles.size(), split.ir.interfaces.size());
}

TEST(Bundles, LucasKanadeGetsFourDistinctBundles) {
  PipelineOptions opt;
  opt.gmem_opt = true;
  CompiledProgram c = compile_or_throw(load_corpus("lucas_kanade"), opt);
  ASSERT_EQ(c.ir.interfaces.size(), 4u);
  std::set<std::string> bundles;
  for (const auto& port : c.ir.interfaces) bundles.insert(port.bundle);
  EXPECT_EQ(bundles.size(), 4u);
}

TEST(Bundles, ZeroPortIrUnchanged) {
  KernelIR ir;
  KernelIR out = assign_bundles(ir, true);
  EXPECT_TRUE(out.interfaces.empty());
}

TEST(Banks, RoundRobinAssignment) {
  CompiledProgram c = compile_or_throw(load_corpus("diamond"));
  LinkConfig link = assign_banks(c.ir, 4);
  ASSERT_EQ(link.entries.size(), 2u);
  EXPECT_EQ(link.entries[0].bank, 0);  // input DDR[0]
  EXPECT_EQ(link.entries[1].bank, 1);  // output DDR[1]
  EXPECT_FALSE(link.overflowed);
}

TEST(Banks, SinglePortGetsBankZero) {
  CompiledProgram c = compile_or_throw(load_corpus("gaussian"));
  LinkConfig link = assign_banks(c.ir, 4);
  ASSERT_EQ(link.entries.size(), 2u);
  EXPECT_EQ(link.entries[0].bank, 0);
}

TEST(Banks, WrapAroundSetsOverflowFlag) {
  CompiledProgram c = compile_or_throw(load_corpus("fig1_parallel"));
  ASSERT_EQ(c.ir.interfaces.size(), 10u);
  LinkConfig link = assign_banks(c.ir, 4);
  EXPECT_TRUE(link.overflowed);
  EXPECT_EQ(link.entries[4].bank, 0);  // fifth port wraps to DDR[0]
}

TEST(Banks, LinkConfigSerializationIsBitExact) {
  CompiledProgram c = compile_or_throw(load_corpus("diamond"));
  LinkConfig link = assign_banks(c.ir, 4);
  EXPECT_EQ(link.to_string(),
            "[connectivity]\n"
            "sp=hls_top_1.input_data:DDR[0]\n"
            "sp=hls_top_1.output_data:DDR[1]\n");
}

TEST(Banks, LucasKanadeFourDistinctBanks) {
  PipelineOptions opt;
  opt.gmem_opt = true;
  CompiledProgram c = compile_or_throw(load_corpus("lucas_kanade"), opt);
  LinkConfig link = assign_banks(c.ir, 4);
  std::set<int> banks;
  for (const auto& e : link.entries) banks.insert(e.bank);
  EXPECT_EQ(banks.size(), 4u);
  EXPECT_FALSE(link.overflowed);
}
