#pragma once

#include <array>
#include <vector>

namespace nsopt {

/// Symmetric Gaussian rule on the reference triangle. Weights refer to the
/// reference measure, i.e. they sum to the reference area 1/2, and the rule
/// is exact for all polynomials of total degree <= degree.
struct QuadratureRule {
  int degree;
  std::vector<std::array<double, 3>> points;  //< barycentric
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

const QuadratureRule& quadrature(int degree);

/// Quadrature degree used by all form assembly.
inline constexpr int kAssemblyQuadDegree = 6;

}  // namespace nsopt
