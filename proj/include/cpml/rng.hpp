#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cpml {

/// Seedable generator with portable output on every platform.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are implementation-defined, so all
/// derived draws (bounded integers, uniforms, normals, shuffles) are
/// implemented here on top of the raw 64-bit stream:
///   - uniform01: top 53 bits scaled by 2^-53, in [0, 1)
///   - below(n): rejection sampling on the raw stream, unbiased
///   - normal: Marsaglia polar method
///   - shuffle: Fisher-Yates from the back
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 mix of (seed, stream); used for per-stage and per-record sub-seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace cpml
