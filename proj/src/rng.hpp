#pragma once

#include <cstdint>
#include <random>

namespace phyfid::detail {

/// Uniform double in [0, 1) from the top 53 bits of the engine. Unlike
/// std::uniform_real_distribution this is identical across standard libraries.
inline double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& engine, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(engine);
}

}  // namespace phyfid::detail
