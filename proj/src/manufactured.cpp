#include "nsopt/manufactured.hpp"

#include <cmath>

namespace nsopt {

namespace {

// f(s) = s^2 (1-s)^2 and derivatives
struct Poly {
  double v, d1, d2, d3;
};

Poly bump(double s) {
  Poly p;
  p.v = s * s - 2.0 * s * s * s + s * s * s * s;
  p.d1 = 2.0 * s - 6.0 * s * s + 4.0 * s * s * s;
  p.d2 = 2.0 - 12.0 * s + 12.0 * s * s;
  p.d3 = -12.0 + 24.0 * s;
  return p;
}

}  // namespace

Vec2 ManufacturedSolution::velocity(const Vec2& x) const {
  const Poly f = bump(x.x()), g = bump(x.y());
  return {f.v * g.d1, -f.d1 * g.v};
}

Eigen::Matrix2d ManufacturedSolution::velocity_gradient(const Vec2& x) const {
  const Poly f = bump(x.x()), g = bump(x.y());
  Eigen::Matrix2d G;
  G << f.d1 * g.d1, f.v * g.d2,
      -f.d2 * g.v, -f.d1 * g.d1;
  return G;
}

double ManufacturedSolution::pressure(const Vec2& x) const { return x.x() - 0.5; }

Vec2 ManufacturedSolution::load(const Vec2& x) const {
  const Poly f = bump(x.x()), g = bump(x.y());
  const double u1 = -nu * (f.d2 * g.d1 + f.v * g.d3) + f.v * f.d1 * g.d1 * g.d1 -
                    f.v * f.d1 * g.v * g.d2 + 1.0;
  const double u2 = nu * (f.d3 * g.v + f.d1 * g.d2) - f.v * f.d2 * g.v * g.d1 +
                    f.d1 * f.d1 * g.v * g.d1;
  return {u1, u2};
}

ErrorNorms velocity_error_norms(const FeFunction& fn,
                                const std::function<Vec2(const Vec2&)>& exact,
                                const std::function<Eigen::Matrix2d(const Vec2&)>& exact_grad) {
  const MixedSpace& sp = *fn.space;
  const Mesh& mesh = *sp.mesh;
  const QuadratureRule& rule = quadrature(8);
  ErrorNorms e;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cells[c];
    const Vec2& p0 = mesh.vertices[t[0]];
    const Eigen::Matrix2d J = mesh.cell_jacobian(c);
    const double two_area = 2.0 * mesh.cell_area(c);
    for (int q = 0; q < rule.size(); ++q) {
      const auto& bary = rule.points[q];
      const Vec2 x = p0 + J * Eigen::Vector2d(bary[1], bary[2]);
      const Vec2 diff = evaluate_velocity_local(fn, c, bary) - exact(x);
      const Eigen::Matrix2d gdiff =
          evaluate_velocity_gradient_local(fn, c, bary) - exact_grad(x);
      const double w = rule.weights[q] * two_area;
      e.l2 += w * diff.squaredNorm();
      e.h1_semi += w * gdiff.squaredNorm();
      e.linf = std::max(e.linf, diff.lpNorm<Eigen::Infinity>());
    }
  }
  e.l2 = std::sqrt(e.l2);
  e.h1_semi = std::sqrt(e.h1_semi);
  return e;
}

double velocity_l2_distance(const FeFunction& coarse, const FeFunction& fine) {
  const MixedSpace& sp = *fine.space;
  const Mesh& mesh = *sp.mesh;
  const QuadratureRule& rule = quadrature(8);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cells[c];
    const Vec2& p0 = mesh.vertices[t[0]];
    const Eigen::Matrix2d J = mesh.cell_jacobian(c);
    const double two_area = 2.0 * mesh.cell_area(c);
    for (int q = 0; q < rule.size(); ++q) {
      const auto& bary = rule.points[q];
      const Vec2 x = p0 + J * Eigen::Vector2d(bary[1], bary[2]);
      const Vec2 diff = evaluate_velocity_local(fine, c, bary) - evaluate_velocity(coarse, x);
      sum += rule.weights[q] * two_area * diff.squaredNorm();
    }
  }
  return std::sqrt(sum);
}

}  // namespace nsopt
