#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slab {

inline constexpr const char* kVersion = "0.1.0";

// Precondition check; throws std::invalid_argument with the offending value
// spelled out so CLI errors name the parameter.
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Weight exponent a of the density y^a, with the derived fractional order
// s = (1-a)/2. Valid only on the open interval (-1,1).
struct WeightExponent {
  double a = 0.0;

  explicit WeightExponent(double a_) : a(a_) {
    require(a > -1.0 && a < 1.0,
            "weight exponent a must lie in (-1,1), got " + std::to_string(a_));
  }

  double s() const { return (1.0 - a) / 2.0; }
};

// Default vertical grading: resolve the y^{-a} boundary layer near y=0 when
// the weight is strongly singular or degenerate.
inline double default_grading(double a) { return std::abs(a) >= 0.5 ? 2.0 : 1.0; }

}  // namespace slab
