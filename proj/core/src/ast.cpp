#include "flower/ast.hpp"

namespace flower {

const char* task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::Point: return "point";
    case TaskKind::Point2: return "point2";
    case TaskKind::Local: return "local";
    case TaskKind::Split: return "split";
    case TaskKind::MemRead: return "read";
    case TaskKind::MemWrite: return "write";
  }
  return "?";
}

namespace {
template <typename T>
int find_by_name(const std::vector<T>& items, const std::string& name) {
  for (size_t i = 0; i < items.size(); ++i)
    if (items[i].name == name) return int(i);
  return -1;
}
}  // namespace

int Program::find_channel(const std::string& name) const { return find_by_name(channels, name); }
int Program::find_image(const std::string& name) const { return find_by_name(images, name); }
int Program::find_task(const std::string& name) const { return find_by_name(tasks, name); }

}  // namespace flower
