#pragma once

#include "nsopt/assembly.hpp"

namespace nsopt {

struct LinearSolution {
  Eigen::VectorXd velocity;
  Eigen::VectorXd pressure;  //< mean-corrected to integral zero
  double residual_norm = 0.0;
  int iterations = 0;  //< 0, the solver is direct
};

/// Sparse LU solve of the full mixed system. Requires the gauge pin and
/// Dirichlet elimination to have been applied; throws SolverError if the
/// factorization fails or the relative residual exceeds 1e-10.
LinearSolution solve_saddle(const SaddleSystem& sys, const MixedSpace& space);

inline constexpr double kLinearResidualTol = 1e-10;

}  // namespace nsopt
