#pragma once

#include <Eigen/Dense>
#include <functional>

#include "nsopt/mesh.hpp"
#include "nsopt/quadrature.hpp"

namespace nsopt {

/// Inf-sup stable velocity/pressure pairs. TaylorHood is continuous P2
/// velocity with continuous P1 pressure; Mini is continuous P1 velocity
/// enriched with a cubic cell bubble, with continuous P1 pressure.
enum class ElementPair { TaylorHood, Mini };

enum class Field { Velocity, Pressure, ControlPiecewiseConstant };

/// Scalar basis values and reference gradients at one barycentric point.
/// Velocity scalar basis: 6 functions for TaylorHood (3 vertex + 3 edge),
/// 4 for Mini (3 vertex + bubble). Pressure basis: 3 (P1).
struct BasisEval {
  int n = 0;
  std::array<double, 6> value{};
  std::array<Eigen::Vector2d, 6> grad{};  //< w.r.t. reference coordinates
};

BasisEval evaluate_velocity_basis(ElementPair pair, const std::array<double, 3>& bary);
BasisEval evaluate_pressure_basis(const std::array<double, 3>& bary);

/// Degree-of-freedom maps for a mixed pair on a mesh. Scalar velocity dofs
/// are numbered vertices first, then edge midpoints (TaylorHood) or cell
/// bubbles (Mini); the full velocity vector stores all x-components before
/// all y-components: dof(comp, s) = comp * scalar_velocity_dofs + s.
/// Immutable after construction.
struct MixedSpace {
  const Mesh* mesh = nullptr;
  ElementPair pair = ElementPair::TaylorHood;
  int scalar_velocity_dofs = 0;
  int velocity_dof_count = 0;  //< 2 * scalar_velocity_dofs
  int pressure_dof_count = 0;  //< vertex count
  int local_scalar_dofs = 0;   //< 6 for TaylorHood, 4 for Mini
  std::vector<std::array<int, 6>> cell_to_scalar_vdofs;
  std::vector<bool> dirichlet_mask;  //< per velocity dof

  int vdof(int comp, int scalar_dof) const { return comp * scalar_velocity_dofs + scalar_dof; }
  /// Position of a scalar velocity dof node (bubble dofs sit at the centroid).
  Vec2 scalar_dof_point(int scalar_dof) const;
  const std::array<int, 3>& cell_to_pressure_dofs(int cell) const { return mesh->cells[cell]; }
};

MixedSpace build_space(const Mesh& m, ElementPair pair);

/// Coefficient vector tagged with its space and field role.
struct FeFunction {
  const MixedSpace* space = nullptr;
  Field field = Field::Velocity;
  Eigen::VectorXd coefficients;
};

using VelocityFn = std::function<Vec2(const Vec2&)>;
using ScalarFn = std::function<double(const Vec2&)>;

/// Nodal (Lagrange) interpolation; the Mini bubble coefficient is set so the
/// interpolant matches f at the cell barycenter.
FeFunction interpolate_velocity(const MixedSpace& space, const VelocityFn& f);
FeFunction interpolate_pressure(const MixedSpace& space, const ScalarFn& f);

Vec2 evaluate_velocity(const FeFunction& fn, const Vec2& p);
double evaluate_pressure(const FeFunction& fn, const Vec2& p);

/// Local evaluation when the containing cell is already known.
Vec2 evaluate_velocity_local(const FeFunction& fn, int cell, const std::array<double, 3>& bary);
double evaluate_pressure_local(const FeFunction& fn, int cell, const std::array<double, 3>& bary);
/// Physical velocity gradient, rows are components: G(i,j) = d v_i / d x_j.
Eigen::Matrix2d evaluate_velocity_gradient_local(const FeFunction& fn, int cell,
                                                 const std::array<double, 3>& bary);

}  // namespace nsopt
