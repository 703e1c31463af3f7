#pragma once

#include <cstdint>
#include <limits>

namespace ustat {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based splitmix64 stream: output k is mix64(seed + (k+1) * golden).
// Streams for (master, component, replication) are keyed by a nested mix,
// so any sample is reproducible without replaying earlier ones.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline Stream derive_stream(std::uint64_t master, std::uint64_t component, std::uint64_t replication) {
  const std::uint64_t a = mix64(master ^ mix64(component + 0x632be59bd9b4e019ULL));
  return Stream(mix64(a ^ mix64(replication + 0x8cb92ba72f3d8dd7ULL)));
}

}  // namespace ustat
