#include "flower/transform.hpp"

#include <set>
#include <sstream>

namespace flower {
namespace {

bool is_memory_task(TaskKind kind) {
  return kind == TaskKind::MemRead || kind == TaskKind::MemWrite;
}

std::string unique_name(const Program& program, std::string base,
                        const std::set<std::string>& pending) {
  auto taken = [&](const std::string& name) {
    return pending.count(name) || program.find_channel(name) >= 0 ||
           program.find_image(name) >= 0 || program.find_task(name) >= 0;
  };
  std::string name = base;
  while (taken(name)) name += "_";
  return name;
}

}  // namespace

std::optional<Program> vectorize(const Program& program, int v, Diagnostics& diags) {
  if (v < 1 || v > kMaxVectorLength) {
    diags.error({}, "vector length " + std::to_string(v) + " exceeds the " +
                        std::to_string(kMaxBusWidthBits) + "-bit memory bus (max " +
                        std::to_string(kMaxVectorLength) + ")");
    return std::nullopt;
  }
  if ((v & (v - 1)) != 0) {
    diags.error({}, "vector length " + std::to_string(v) +
                        " must be a power of two to match a legal bus width");
    return std::nullopt;
  }
  if (program.width % v != 0) {
    diags.error({}, "vector length " + std::to_string(v) + " does not divide image width " +
                        std::to_string(program.width));
    return std::nullopt;
  }
  Program result = program;
  result.vector_length = v;
  for (auto& channel : result.channels) channel.elem_width = v;
  return result;
}

Program burst_split(const Program& program) {
  Program result = program;
  std::set<std::string> pending;

  struct ReadPlan {
    int image;
    std::vector<int> consumers;  // task indices in the original program
  };
  std::vector<ReadPlan> reads;
  struct WritePlan {
    int image;
    int producer;
  };
  std::vector<WritePlan> writes;

  for (size_t t = 0; t < program.tasks.size(); ++t) {
    const Task& task = program.tasks[t];
    if (is_memory_task(task.kind)) continue;
    for (const auto& ref : task.reads) {
      if (ref.kind != Ref::Kind::Image) continue;
      auto it = std::find_if(reads.begin(), reads.end(),
                             [&](const ReadPlan& p) { return p.image == ref.index; });
      if (it == reads.end()) {
        reads.push_back({ref.index, {int(t)}});
      } else {
        it->consumers.push_back(int(t));
      }
    }
    for (const auto& ref : task.writes)
      if (ref.kind == Ref::Kind::Image) writes.push_back({ref.index, int(t)});
  }
  if (reads.empty() && writes.empty()) return result;

  std::vector<Task> read_tasks, write_tasks;

  for (const auto& plan : reads) {
    Task reader;
    reader.name = unique_name(program, "read_" + program.images[plan.image].name, pending);
    pending.insert(reader.name);
    reader.kind = TaskKind::MemRead;
    reader.reads.push_back(Ref{Ref::Kind::Image, plan.image});
    for (size_t j = 0; j < plan.consumers.size(); ++j) {
      std::string base = program.images[plan.image].name + "_q";
      if (plan.consumers.size() > 1) base += std::to_string(j);
      std::string chan_name = unique_name(program, base, pending);
      pending.insert(chan_name);
      ChannelDecl chan;
      chan.name = chan_name;
      chan.elem_width = program.vector_length;
      int chan_index = int(result.channels.size());
      result.channels.push_back(chan);
      reader.writes.push_back(Ref{Ref::Kind::Channel, chan_index});
      // Rewire the consumer's image read to the fresh channel.
      Task& consumer = result.tasks[plan.consumers[j]];
      for (auto& ref : consumer.reads)
        if (ref.kind == Ref::Kind::Image && ref.index == plan.image)
          ref = Ref{Ref::Kind::Channel, chan_index};
    }
    read_tasks.push_back(std::move(reader));
  }

  for (const auto& plan : writes) {
    Task writer;
    writer.name = unique_name(program, "write_" + program.images[plan.image].name, pending);
    pending.insert(writer.name);
    writer.kind = TaskKind::MemWrite;
    std::string chan_name =
        unique_name(program, program.images[plan.image].name + "_q", pending);
    pending.insert(chan_name);
    ChannelDecl chan;
    chan.name = chan_name;
    chan.elem_width = program.vector_length;
    int chan_index = int(result.channels.size());
    result.channels.push_back(chan);
    writer.reads.push_back(Ref{Ref::Kind::Channel, chan_index});
    writer.writes.push_back(Ref{Ref::Kind::Image, plan.image});
    Task& producer = result.tasks[plan.producer];
    for (auto& ref : producer.writes)
      if (ref.kind == Ref::Kind::Image && ref.index == plan.image)
        ref = Ref{Ref::Kind::Channel, chan_index};
    write_tasks.push_back(std::move(writer));
  }

  std::vector<Task> tasks;
  tasks.reserve(read_tasks.size() + result.tasks.size() + write_tasks.size());
  for (auto& t : read_tasks) tasks.push_back(std::move(t));
  for (auto& t : result.tasks) tasks.push_back(std::move(t));
  for (auto& t : write_tasks) tasks.push_back(std::move(t));
  result.tasks = std::move(tasks);
  return result;
}

std::optional<Program> with_image_size(const Program& program, int width, int height,
                                       Diagnostics& diags) {
  if (width <= 0 || height <= 0) {
    diags.error({}, "image size must be positive");
    return std::nullopt;
  }
  if (width % program.vector_length != 0) {
    diags.error({}, "vector length " + std::to_string(program.vector_length) +
                        " does not divide image width " + std::to_string(width));
    return std::nullopt;
  }
  Program result = program;
  result.width = width;
  result.height = height;
  for (auto& img : result.images) {
    img.width = width;
    img.height = height;
  }
  return result;
}

KernelIR assign_bundles(KernelIR ir, bool gmem_opt) {
  for (size_t i = 0; i < ir.interfaces.size(); ++i)
    ir.interfaces[i].bundle = gmem_opt ? "gmem" + std::to_string(i) : "gmem0";
  return ir;
}

std::string LinkConfig::to_string() const {
  std::ostringstream out;
  out << "[connectivity]\n";
  for (const auto& e : entries)
    out << "sp=" << e.instance << '.' << e.port << ":DDR[" << e.bank << "]\n";
  return out.str();
}

LinkConfig assign_banks(const KernelIR& ir, int bank_count) {
  LinkConfig config;
  if (bank_count < 1) bank_count = 1;
  for (size_t i = 0; i < ir.interfaces.size(); ++i) {
    LinkConfig::Entry entry;
    entry.instance = ir.kernel_name + "_1";
    entry.port = ir.interfaces[i].port_name;
    entry.bank = int(i) % bank_count;
    config.entries.push_back(std::move(entry));
  }
  config.overflowed = int(ir.interfaces.size()) > bank_count;
  return config;
}

}  // namespace flower
