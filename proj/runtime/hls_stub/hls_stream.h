// Host-side stand-in for the Vitis HLS stream header. Just enough to
// compile and execute generated kernels with an ordinary C++ compiler;
// streams are unbounded here, so only functional behavior is checked.
#pragma once

#include <cstdlib>
#include <deque>

namespace hls {

template <typename T>
class stream {
 public:
  void write(const T& value) { queue_.push_back(value); }

  T read() {
    if (queue_.empty()) std::abort();  // read past end of stream
    T value = queue_.front();
    queue_.pop_front();
    return value;
  }

  bool empty() const { return queue_.empty(); }
  size_t size() const { return queue_.size(); }

 private:
  std::deque<T> queue_;
};

}  // namespace hls
