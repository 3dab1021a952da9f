#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nsopt/elements.hpp"

namespace nsopt {

/// Compressed sparse row storage.
using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Gauge { None, PinFirstPressureDof };

/// Block system [A B^T; B 0] with velocity rhs f and pressure rhs g. The
/// momentum block uses the sign convention A v - B^T p = f, B v = g.
struct SaddleSystem {
  SparseMat A;  //< velocity x velocity (viscous + convection)
  SparseMat B;  //< pressure x velocity divergence coupling
  Eigen::VectorXd f;
  Eigen::VectorXd g;
  Gauge gauge = Gauge::PinFirstPressureDof;
};

/// Control/load evaluation at a quadrature point of a known cell. Covers
/// analytic loads, piecewise-constant controls, and the clamped-adjoint
/// closure of the semidiscrete scheme.
using CellwiseFn = std::function<Vec2(int cell, const std::array<double, 3>& bary, const Vec2& x)>;

CellwiseFn cellwise(VelocityFn f);
CellwiseFn cellwise_constant(const std::vector<Vec2>& cell_values);

/// nu * vector Laplacian stiffness.
SparseMat assemble_viscous(const MixedSpace& space, double nu);

/// B[q,v] = (pressure basis q, div velocity basis v).
SparseMat assemble_divergence(const MixedSpace& space);

/// Convection linearizations at y: C1[i,j] = b(y; phi_j, phi_i),
/// C2[i,j] = b(phi_j; y, phi_i), with b(v1;v2,v3) = ((v1.grad)v2, v3).
std::pair<SparseMat, SparseMat> assemble_convection(const MixedSpace& space, const FeFunction& y);

SparseMat assemble_mass_velocity(const MixedSpace& space);
SparseMat assemble_mass_pressure(const MixedSpace& space);

/// f[i] = sum_t phi_i(t) . c_t (component matched). Points must be interior.
Eigen::VectorXd assemble_dirac_rhs(const MixedSpace& space, const std::vector<Vec2>& points,
                                   const std::vector<Vec2>& coefficients);

/// f[i] = integral of u . phi_i, cellwise quadrature of degree
/// kAssemblyQuadDegree.
Eigen::VectorXd assemble_load(const MixedSpace& space, const CellwiseFn& u);

/// Symmetric elimination of Dirichlet velocity dofs: masked rows/columns of A
/// zeroed with unit diagonal and zero rhs; masked columns of B zeroed.
void apply_dirichlet(SaddleSystem& sys, const MixedSpace& space);

/// Per-pressure-dof integrals of the P1 basis (for mean correction).
Eigen::VectorXd pressure_basis_integrals(const MixedSpace& space);

void write_matrix_market(const SparseMat& m, const std::string& path);

}  // namespace nsopt
