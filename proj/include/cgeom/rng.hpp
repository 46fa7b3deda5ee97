#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cgeom {

// Bit-level mappings so draws do not depend on the standard library's distributions.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& g, double a, double b) { return a + (b - a) * uniform01(g); }

inline double normal(std::mt19937_64& g) {
  double u1 = uniform01(g);
  while (u1 <= 0) u1 = uniform01(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace cgeom
