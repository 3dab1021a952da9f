#pragma once

#include "nsopt/sparse_linalg.hpp"

namespace nsopt {

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
  bool damping_used = false;  //< continuation in nu was needed
};

struct StateSolution {
  FeFunction y;  //< velocity, discretely divergence free
  FeFunction p;  //< pressure, integral zero
  NewtonReport report;
};

struct StateOptions {
  double tol = 1e-10;       //< relative nonlinear residual tolerance
  int max_iter = 25;
  int max_continuation = 6; //< continuation levels nu * 2^m
  const FeFunction* warm_start = nullptr;  //< velocity initial guess
};

/// Newton solve of the discrete stationary Navier-Stokes equations with
/// homogeneous Dirichlet velocity data and load u. Initial guess is the
/// Stokes solution unless a warm start is given; on divergence, continuation
/// halves nu down from nu * 2^m.
StateSolution solve_state(const MixedSpace& space, double nu, const CellwiseFn& u,
                          const StateOptions& opts = {});

/// Linearized state solve at a given velocity y: finds (phi, zeta) with
///   nu (grad phi, grad v) + b(y; phi, v) + b(phi; y, v) - (zeta, div v) = g . v,
///   (q, div phi) = 0.
std::pair<FeFunction, FeFunction> solve_linearized(const MixedSpace& space, double nu,
                                                   const FeFunction& at_y,
                                                   const Eigen::VectorXd& g);

/// Velocity block A(nu) + C1(y) + C2(y) after Dirichlet elimination, together
/// with the eliminated divergence block. Shared by the linearized-state and
/// adjoint solvers; the adjoint uses the transpose of the velocity block.
SaddleSystem build_linearized_system(const MixedSpace& space, double nu, const FeFunction& y);

}  // namespace nsopt
