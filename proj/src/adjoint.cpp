#include "nsopt/adjoint.hpp"

#include "nsopt/errors.hpp"

namespace nsopt {

std::pair<FeFunction, FeFunction> solve_adjoint_with_rhs(const MixedSpace& space, double nu,
                                                         const FeFunction& y,
                                                         const Eigen::VectorXd& rhs) {
  SaddleSystem sys = build_linearized_system(space, nu, y);
  // symmetric elimination commutes with transposition, so transposing the
  // eliminated velocity block yields the eliminated adjoint operator
  sys.A = SparseMat(sys.A.transpose());
  sys.f = rhs;
  for (int dof = 0; dof < space.velocity_dof_count; ++dof)
    if (space.dirichlet_mask[dof]) sys.f[dof] = 0.0;
  const LinearSolution sol = solve_saddle(sys, space);
  return {FeFunction{&space, Field::Velocity, sol.velocity},
          FeFunction{&space, Field::Pressure, sol.pressure}};
}

AdjointSolution solve_adjoint(const MixedSpace& space, double nu, const FeFunction& y,
                              const TrackingData& data) {
  if (data.points.size() != data.targets.size())
    throw InputError("solve_adjoint: tracking points/targets size mismatch");
  std::vector<Vec2> mismatch(data.points.size());
  for (size_t k = 0; k < data.points.size(); ++k)
    mismatch[k] = evaluate_velocity(y, data.points[k]) - data.targets[k];
  const Eigen::VectorXd rhs = assemble_dirac_rhs(space, data.points, mismatch);
  auto [z, r] = solve_adjoint_with_rhs(space, nu, y, rhs);
  return {std::move(z), std::move(r)};
}

}  // namespace nsopt
