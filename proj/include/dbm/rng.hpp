#pragma once

#include <cstdint>

namespace dbm {

/// Counter-based random stream. Each draw hashes (key, counter), so a
/// stream's state is fully described by its key and a draw count — chains
/// can advance in any schedule and still reproduce bit-exactly.
class CounterRng {
 public:
  CounterRng() = default;
  CounterRng(uint64_t seed, uint64_t stream)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  uint64_t next() { return mix(key_ + mix(counter_++)); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  uint64_t counter() const { return counter_; }
  void set_counter(uint64_t c) { counter_ = c; }
  uint64_t key() const { return key_; }

 private:
  // splitmix64 finalizer.
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace dbm
