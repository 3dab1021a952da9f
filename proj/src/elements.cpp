#include "nsopt/elements.hpp"

#include "nsopt/errors.hpp"

namespace nsopt {

// Reference coordinates: lambda = (1 - xi - eta, xi, eta), so
// grad lambda0 = (-1,-1), grad lambda1 = (1,0), grad lambda2 = (0,1).
namespace {

const Eigen::Vector2d kGradLambda[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};

// Local edges follow the mesh convention (0,1), (1,2), (2,0).
constexpr int kEdgeVerts[3][2] = {{0, 1}, {1, 2}, {2, 0}};

}  // namespace

BasisEval evaluate_velocity_basis(ElementPair pair, const std::array<double, 3>& bary) {
  BasisEval out;
  const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
  const double l[3] = {l0, l1, l2};
  if (pair == ElementPair::TaylorHood) {
    out.n = 6;
    for (int i = 0; i < 3; ++i) {
      out.value[i] = l[i] * (2.0 * l[i] - 1.0);
      out.grad[i] = (4.0 * l[i] - 1.0) * kGradLambda[i];
    }
    for (int e = 0; e < 3; ++e) {
      const int a = kEdgeVerts[e][0], b = kEdgeVerts[e][1];
      out.value[3 + e] = 4.0 * l[a] * l[b];
      out.grad[3 + e] = 4.0 * (l[b] * kGradLambda[a] + l[a] * kGradLambda[b]);
    }
  } else {
    out.n = 4;
    for (int i = 0; i < 3; ++i) {
      out.value[i] = l[i];
      out.grad[i] = kGradLambda[i];
    }
    out.value[3] = 27.0 * l0 * l1 * l2;
    out.grad[3] = 27.0 * (l1 * l2 * kGradLambda[0] + l0 * l2 * kGradLambda[1] +
                          l0 * l1 * kGradLambda[2]);
  }
  return out;
}

BasisEval evaluate_pressure_basis(const std::array<double, 3>& bary) {
  BasisEval out;
  out.n = 3;
  for (int i = 0; i < 3; ++i) {
    out.value[i] = bary[i];
    out.grad[i] = kGradLambda[i];
  }
  return out;
}

Vec2 MixedSpace::scalar_dof_point(int s) const {
  const int nv = mesh->num_vertices();
  if (s < nv) return mesh->vertices[s];
  if (pair == ElementPair::TaylorHood) {
    const auto& e = mesh->edges[s - nv];
    return 0.5 * (mesh->vertices[e.v0] + mesh->vertices[e.v1]);
  }
  return mesh->cell_centroid(s - nv);
}

MixedSpace build_space(const Mesh& m, ElementPair pair) {
  MixedSpace sp;
  sp.mesh = &m;
  sp.pair = pair;
  const int nv = m.num_vertices();
  if (pair == ElementPair::TaylorHood) {
    sp.local_scalar_dofs = 6;
    sp.scalar_velocity_dofs = nv + m.num_edges();
  } else {
    sp.local_scalar_dofs = 4;
    sp.scalar_velocity_dofs = nv + m.num_cells();
  }
  sp.velocity_dof_count = 2 * sp.scalar_velocity_dofs;
  sp.pressure_dof_count = nv;

  sp.cell_to_scalar_vdofs.resize(m.num_cells());
  for (int c = 0; c < m.num_cells(); ++c) {
    auto& dofs = sp.cell_to_scalar_vdofs[c];
    dofs.fill(-1);
    for (int i = 0; i < 3; ++i) dofs[i] = m.cells[c][i];
    if (pair == ElementPair::TaylorHood) {
      for (int e = 0; e < 3; ++e) dofs[3 + e] = nv + m.cell_edges[c][e];
    } else {
      dofs[3] = nv + c;
    }
  }

  sp.dirichlet_mask.assign(sp.velocity_dof_count, false);
  auto mark = [&sp](int scalar_dof) {
    sp.dirichlet_mask[sp.vdof(0, scalar_dof)] = true;
    sp.dirichlet_mask[sp.vdof(1, scalar_dof)] = true;
  };
  for (int v = 0; v < nv; ++v)
    if (m.vertex_on_boundary[v]) mark(v);
  if (pair == ElementPair::TaylorHood) {
    for (int e = 0; e < m.num_edges(); ++e)
      if (m.edge_on_boundary[e]) mark(nv + e);
  }
  return sp;
}

FeFunction interpolate_velocity(const MixedSpace& space, const VelocityFn& f) {
  FeFunction fn{&space, Field::Velocity, Eigen::VectorXd::Zero(space.velocity_dof_count)};
  const int n = space.scalar_velocity_dofs;
  const int nv = space.mesh->num_vertices();
  const int n_nodal = (space.pair == ElementPair::TaylorHood) ? n : nv;
  for (int s = 0; s < n_nodal; ++s) {
    const Vec2 v = f(space.scalar_dof_point(s));
    fn.coefficients[s] = v.x();
    fn.coefficients[n + s] = v.y();
  }
  if (space.pair == ElementPair::Mini) {
    // bubble coefficient: match f at the barycenter on top of the P1 part
    for (int c = 0; c < space.mesh->num_cells(); ++c) {
      const auto& t = space.mesh->cells[c];
      const Vec2 target = f(space.mesh->cell_centroid(c));
      for (int comp = 0; comp < 2; ++comp) {
        double p1_val = 0.0;
        for (int i = 0; i < 3; ++i) p1_val += fn.coefficients[comp * n + t[i]] / 3.0;
        fn.coefficients[comp * n + nv + c] = target[comp] - p1_val;
      }
    }
  }
  return fn;
}

FeFunction interpolate_pressure(const MixedSpace& space, const ScalarFn& f) {
  FeFunction fn{&space, Field::Pressure, Eigen::VectorXd::Zero(space.pressure_dof_count)};
  for (int v = 0; v < space.pressure_dof_count; ++v)
    fn.coefficients[v] = f(space.mesh->vertices[v]);
  return fn;
}

Vec2 evaluate_velocity_local(const FeFunction& fn, int cell, const std::array<double, 3>& bary) {
  const MixedSpace& sp = *fn.space;
  const BasisEval basis = evaluate_velocity_basis(sp.pair, bary);
  const auto& dofs = sp.cell_to_scalar_vdofs[cell];
  Vec2 out = Vec2::Zero();
  for (int i = 0; i < basis.n; ++i) {
    out.x() += fn.coefficients[sp.vdof(0, dofs[i])] * basis.value[i];
    out.y() += fn.coefficients[sp.vdof(1, dofs[i])] * basis.value[i];
  }
  return out;
}

double evaluate_pressure_local(const FeFunction& fn, int cell, const std::array<double, 3>& bary) {
  const auto& t = fn.space->mesh->cells[cell];
  return fn.coefficients[t[0]] * bary[0] + fn.coefficients[t[1]] * bary[1] +
         fn.coefficients[t[2]] * bary[2];
}

Eigen::Matrix2d evaluate_velocity_gradient_local(const FeFunction& fn, int cell,
                                                 const std::array<double, 3>& bary) {
  const MixedSpace& sp = *fn.space;
  const BasisEval basis = evaluate_velocity_basis(sp.pair, bary);
  const auto& dofs = sp.cell_to_scalar_vdofs[cell];
  const Eigen::Matrix2d Jinv_t = sp.mesh->cell_jacobian(cell).inverse().transpose();
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
  for (int i = 0; i < basis.n; ++i) {
    const Eigen::Vector2d g = Jinv_t * basis.grad[i];
    G.row(0) += fn.coefficients[sp.vdof(0, dofs[i])] * g.transpose();
    G.row(1) += fn.coefficients[sp.vdof(1, dofs[i])] * g.transpose();
  }
  return G;
}

Vec2 evaluate_velocity(const FeFunction& fn, const Vec2& p) {
  const PointLocation loc = locate_point(*fn.space->mesh, p);
  return evaluate_velocity_local(fn, loc.cell_index, loc.barycentric);
}

double evaluate_pressure(const FeFunction& fn, const Vec2& p) {
  const PointLocation loc = locate_point(*fn.space->mesh, p);
  return evaluate_pressure_local(fn, loc.cell_index, loc.barycentric);
}

}  // namespace nsopt
