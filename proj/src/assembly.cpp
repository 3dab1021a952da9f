#include "nsopt/assembly.hpp"

#include <cstdio>
#include <fstream>

#include "nsopt/errors.hpp"

namespace nsopt {

namespace {

using Triplet = Eigen::Triplet<double>;

struct CellGeometry {
  double area;                 //< |det J| / 2, positive for ccw cells
  Eigen::Matrix2d jinv_t;      //< physical gradient = jinv_t * reference gradient
  Vec2 origin;                 //< first vertex
  Eigen::Matrix2d jac;
};

CellGeometry cell_geometry(const Mesh& m, int c) {
  CellGeometry g;
  g.jac = m.cell_jacobian(c);
  g.area = 0.5 * g.jac.determinant();
  g.jinv_t = g.jac.inverse().transpose();
  g.origin = m.vertices[m.cells[c][0]];
  return g;
}

Vec2 physical_point(const CellGeometry& g, const std::array<double, 3>& bary) {
  return g.origin + g.jac * Eigen::Vector2d(bary[1], bary[2]);
}

SparseMat from_triplets(int rows, int cols, std::vector<Triplet>& trip) {
  SparseMat m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace

CellwiseFn cellwise(VelocityFn f) {
  return [f = std::move(f)](int, const std::array<double, 3>&, const Vec2& x) { return f(x); };
}

CellwiseFn cellwise_constant(const std::vector<Vec2>& cell_values) {
  return [&cell_values](int cell, const std::array<double, 3>&, const Vec2&) {
    return cell_values[cell];
  };
}

SparseMat assemble_viscous(const MixedSpace& space, double nu) {
  if (!(nu > 0.0)) throw InputError("assemble_viscous: nu must be positive");
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature(kAssemblyQuadDegree);
  std::vector<Triplet> trip;
  const int nloc = space.local_scalar_dofs;
  trip.reserve(static_cast<size_t>(mesh.num_cells()) * nloc * nloc * 2);
  std::vector<Eigen::Vector2d> grad(nloc);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    const auto& dofs = space.cell_to_scalar_vdofs[c];
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nloc, nloc);
    for (int q = 0; q < rule.size(); ++q) {
      const BasisEval basis = evaluate_velocity_basis(space.pair, rule.points[q]);
      const double w = rule.weights[q] * 2.0 * geo.area;
      for (int i = 0; i < nloc; ++i) grad[i] = geo.jinv_t * basis.grad[i];
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          local(i, j) += w * grad[i].dot(grad[j]);
    }
    for (int comp = 0; comp < 2; ++comp)
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          trip.emplace_back(space.vdof(comp, dofs[i]), space.vdof(comp, dofs[j]),
                            nu * local(i, j));
  }
  return from_triplets(space.velocity_dof_count, space.velocity_dof_count, trip);
}

SparseMat assemble_divergence(const MixedSpace& space) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature(kAssemblyQuadDegree);
  std::vector<Triplet> trip;
  const int nloc = space.local_scalar_dofs;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    const auto& dofs = space.cell_to_scalar_vdofs[c];
    const auto& pdofs = space.cell_to_pressure_dofs(c);
    for (int q = 0; q < rule.size(); ++q) {
      const BasisEval vbasis = evaluate_velocity_basis(space.pair, rule.points[q]);
      const BasisEval pbasis = evaluate_pressure_basis(rule.points[q]);
      const double w = rule.weights[q] * 2.0 * geo.area;
      for (int j = 0; j < nloc; ++j) {
        const Eigen::Vector2d g = geo.jinv_t * vbasis.grad[j];
        for (int i = 0; i < 3; ++i)
          for (int comp = 0; comp < 2; ++comp)
            trip.emplace_back(pdofs[i], space.vdof(comp, dofs[j]),
                              w * pbasis.value[i] * g[comp]);
      }
    }
  }
  return from_triplets(space.pressure_dof_count, space.velocity_dof_count, trip);
}

std::pair<SparseMat, SparseMat> assemble_convection(const MixedSpace& space,
                                                    const FeFunction& y) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature(kAssemblyQuadDegree);
  const int nloc = space.local_scalar_dofs;
  std::vector<Triplet> t1, t2;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    const auto& dofs = space.cell_to_scalar_vdofs[c];
    for (int q = 0; q < rule.size(); ++q) {
      const BasisEval basis = evaluate_velocity_basis(space.pair, rule.points[q]);
      const double w = rule.weights[q] * 2.0 * geo.area;
      const Vec2 yq = evaluate_velocity_local(y, c, rule.points[q]);
      const Eigen::Matrix2d gy = evaluate_velocity_gradient_local(y, c, rule.points[q]);
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j < nloc; ++j) {
          // C1: ((y.grad) phi_j) . phi_i, component diagonal
          const Eigen::Vector2d gj = geo.jinv_t * basis.grad[j];
          const double conv = yq.dot(gj) * basis.value[i];
          for (int comp = 0; comp < 2; ++comp)
            t1.emplace_back(space.vdof(comp, dofs[i]), space.vdof(comp, dofs[j]), w * conv);
          // C2: ((phi_j.grad) y) . phi_i couples components via grad y
          const double nn = basis.value[i] * basis.value[j];
          for (int ci = 0; ci < 2; ++ci)
            for (int cj = 0; cj < 2; ++cj)
              t2.emplace_back(space.vdof(ci, dofs[i]), space.vdof(cj, dofs[j]),
                              w * nn * gy(ci, cj));
        }
      }
    }
  }
  const int n = space.velocity_dof_count;
  return {from_triplets(n, n, t1), from_triplets(n, n, t2)};
}

SparseMat assemble_mass_velocity(const MixedSpace& space) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature(kAssemblyQuadDegree);
  const int nloc = space.local_scalar_dofs;
  std::vector<Triplet> trip;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    const auto& dofs = space.cell_to_scalar_vdofs[c];
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nloc, nloc);
    for (int q = 0; q < rule.size(); ++q) {
      const BasisEval basis = evaluate_velocity_basis(space.pair, rule.points[q]);
      const double w = rule.weights[q] * 2.0 * geo.area;
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          local(i, j) += w * basis.value[i] * basis.value[j];
    }
    for (int comp = 0; comp < 2; ++comp)
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          trip.emplace_back(space.vdof(comp, dofs[i]), space.vdof(comp, dofs[j]), local(i, j));
  }
  return from_triplets(space.velocity_dof_count, space.velocity_dof_count, trip);
}

SparseMat assemble_mass_pressure(const MixedSpace& space) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature(2);
  std::vector<Triplet> trip;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double area = mesh.cell_area(c);
    const auto& pdofs = space.cell_to_pressure_dofs(c);
    for (int q = 0; q < rule.size(); ++q) {
      const BasisEval basis = evaluate_pressure_basis(rule.points[q]);
      const double w = rule.weights[q] * 2.0 * area;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          trip.emplace_back(pdofs[i], pdofs[j], w * basis.value[i] * basis.value[j]);
    }
  }
  return from_triplets(space.pressure_dof_count, space.pressure_dof_count, trip);
}

Eigen::VectorXd assemble_dirac_rhs(const MixedSpace& space, const std::vector<Vec2>& points,
                                   const std::vector<Vec2>& coefficients) {
  if (points.size() != coefficients.size())
    throw InputError("assemble_dirac_rhs: points/coefficients size mismatch");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.velocity_dof_count);
  const auto& rect = space.mesh->rect;
  for (size_t k = 0; k < points.size(); ++k) {
    const Vec2& p = points[k];
    if (p.x() <= rect[0] || p.x() >= rect[2] || p.y() <= rect[1] || p.y() >= rect[3])
      throw InputError("assemble_dirac_rhs: point lies on the boundary");
    const PointLocation loc = locate_point(*space.mesh, p);
    const BasisEval basis = evaluate_velocity_basis(space.pair, loc.barycentric);
    const auto& dofs = space.cell_to_scalar_vdofs[loc.cell_index];
    // test functions vanish on the boundary, so masked dofs get no entry
    for (int i = 0; i < basis.n; ++i) {
      for (int comp = 0; comp < 2; ++comp) {
        const int dof = space.vdof(comp, dofs[i]);
        if (!space.dirichlet_mask[dof]) rhs[dof] += basis.value[i] * coefficients[k][comp];
      }
    }
  }
  return rhs;
}

Eigen::VectorXd assemble_load(const MixedSpace& space, const CellwiseFn& u) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature(kAssemblyQuadDegree);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(space.velocity_dof_count);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    const auto& dofs = space.cell_to_scalar_vdofs[c];
    for (int q = 0; q < rule.size(); ++q) {
      const BasisEval basis = evaluate_velocity_basis(space.pair, rule.points[q]);
      const double w = rule.weights[q] * 2.0 * geo.area;
      const Vec2 uq = u(c, rule.points[q], physical_point(geo, rule.points[q]));
      for (int i = 0; i < basis.n; ++i)
        for (int comp = 0; comp < 2; ++comp)
          f[space.vdof(comp, dofs[i])] += w * basis.value[i] * uq[comp];
    }
  }
  return f;
}

void apply_dirichlet(SaddleSystem& sys, const MixedSpace& space) {
  const auto& mask = space.dirichlet_mask;
  // A: zero masked rows and columns, unit diagonal on masked rows
  for (int row = 0; row < sys.A.outerSize(); ++row) {
    for (SparseMat::InnerIterator it(sys.A, row); it; ++it) {
      if (mask[row] || mask[it.col()])
        it.valueRef() = (row == it.col()) ? 1.0 : 0.0;
    }
  }
  // make sure every masked row has its diagonal present
  for (int dof = 0; dof < space.velocity_dof_count; ++dof)
    if (mask[dof] && sys.A.coeff(dof, dof) == 0.0) sys.A.coeffRef(dof, dof) = 1.0;
  sys.A.prune(0.0);
  sys.A.makeCompressed();
  for (int row = 0; row < sys.B.outerSize(); ++row)
    for (SparseMat::InnerIterator it(sys.B, row); it; ++it)
      if (mask[it.col()]) it.valueRef() = 0.0;
  sys.B.prune(0.0);
  sys.B.makeCompressed();
  for (int dof = 0; dof < space.velocity_dof_count; ++dof)
    if (mask[dof]) sys.f[dof] = 0.0;
}

Eigen::VectorXd pressure_basis_integrals(const MixedSpace& space) {
  const Mesh& mesh = *space.mesh;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(space.pressure_dof_count);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double third = mesh.cell_area(c) / 3.0;
    for (int i = 0; i < 3; ++i) w[mesh.cells[c][i]] += third;
  }
  return w;
}

void write_matrix_market(const SparseMat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("write_matrix_market: cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  char buf[64];
  for (int row = 0; row < m.outerSize(); ++row) {
    for (SparseMat::InnerIterator it(m, row); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << row + 1 << " " << it.col() + 1 << " " << buf << "\n";
    }
  }
}

}  // namespace nsopt
