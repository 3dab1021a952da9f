#pragma once

#include "nsopt/nse_state.hpp"

namespace nsopt {

/// Tracking points (the ordered set D) and target velocities.
struct TrackingData {
  std::vector<Vec2> points;
  std::vector<Vec2> targets;
};

struct AdjointSolution {
  FeFunction z;  //< adjoint velocity
  FeFunction r;  //< adjoint pressure, integral zero
};

/// Solves the discrete adjoint equations: the transpose of the linearized
/// state operator at y, driven by Dirac loads at the tracking points with
/// weights y(t) - y_t.
AdjointSolution solve_adjoint(const MixedSpace& space, double nu, const FeFunction& y,
                              const TrackingData& data);

/// Same system with an arbitrary velocity right-hand side (used by tests).
std::pair<FeFunction, FeFunction> solve_adjoint_with_rhs(const MixedSpace& space, double nu,
                                                         const FeFunction& y,
                                                         const Eigen::VectorXd& rhs);

}  // namespace nsopt
