#pragma once

#include <numbers>

namespace fisherspec {

/// CODATA 2018 values in SI units. Not configurable.
struct PhysicalConstants {
  static constexpr double hbar = 1.054571817e-34;   // J s
  static constexpr double eps0 = 8.8541878128e-12;  // F/m
  static constexpr double c = 2.99792458e8;         // m/s
};

inline constexpr double kPi = std::numbers::pi;

}  // namespace fisherspec
