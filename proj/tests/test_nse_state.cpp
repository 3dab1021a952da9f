#include <doctest.h>

#include "nsopt/errors.hpp"
#include "nsopt/manufactured.hpp"
#include "nsopt/nse_state.hpp"

using namespace nsopt;

namespace {

double divergence_defect(const MixedSpace& s, const FeFunction& y) {
  SparseMat B = assemble_divergence(s);
  // columns of Dirichlet dofs are zeroed for the discrete continuity test,
  // matching the eliminated system the solver satisfies
  SaddleSystem sys;
  sys.A = assemble_viscous(s, 1.0);
  sys.B = B;
  sys.f = Eigen::VectorXd::Zero(s.velocity_dof_count);
  sys.g = Eigen::VectorXd::Zero(s.pressure_dof_count);
  apply_dirichlet(sys, s);
  return (sys.B * y.coefficients).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("zero load gives the zero state in at most one Newton step") {
  const Mesh m = build_structured(4, 4);
  for (ElementPair pair : {ElementPair::TaylorHood, ElementPair::Mini}) {
    const MixedSpace s = build_space(m, pair);
    const StateSolution sol =
        solve_state(s, 1.0, cellwise([](const Vec2&) { return Vec2(0, 0); }));
    CHECK(sol.report.converged);
    CHECK(sol.report.iterations <= 1);
    CHECK(sol.y.coefficients.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sol.p.coefficients.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("manufactured solution: Taylor-Hood H1 convergence order 2") {
  const ManufacturedSolution exact{1.0};
  std::vector<double> errors, hs;
  for (int n : {8, 16, 32}) {
    const Mesh m = build_structured(n, n);
    const MixedSpace s = build_space(m, ElementPair::TaylorHood);
    const StateSolution sol =
        solve_state(s, 1.0, cellwise([&](const Vec2& x) { return exact.load(x); }));
    REQUIRE(sol.report.converged);
    const ErrorNorms e = velocity_error_norms(
        sol.y, [&](const Vec2& x) { return exact.velocity(x); },
        [&](const Vec2& x) { return exact.velocity_gradient(x); });
    errors.push_back(e.h1_semi);
    hs.push_back(m.h_max);
    // pressure gauge holds on every solve
    const Eigen::VectorXd w = pressure_basis_integrals(s);
    CHECK(std::abs(w.dot(sol.p.coefficients)) <= 1e-12 * sol.p.coefficients.norm() + 1e-15);
    CHECK(divergence_defect(s, sol.y) <=
          1e-9 * (1.0 + sol.y.coefficients.cwiseAbs().maxCoeff()));
  }
  for (size_t k = 1; k < errors.size(); ++k) {
    const double eoc = std::log(errors[k - 1] / errors[k]) / std::log(hs[k - 1] / hs[k]);
    CHECK(eoc > 1.8);
    CHECK(eoc < 2.2);
  }
}

TEST_CASE("newton converges fast with a quadratic tail on generic data") {
  const Mesh m = build_structured(16, 16);
  const MixedSpace s = build_space(m, ElementPair::TaylorHood);
  const StateSolution sol =
      solve_state(s, 1.0, cellwise([](const Vec2&) { return Vec2(1.0, 1.0); }));
  CHECK(sol.report.converged);
  CHECK(sol.report.iterations <= 6);
  CHECK_FALSE(sol.report.damping_used);
  const auto& r = sol.report.residual_history;
  REQUIRE(r.size() >= 2);
  for (size_t k = 1; k < r.size(); ++k) CHECK(r[k] < r[k - 1]);
  // quadratic tail: r_{k+1} <= C r_k^2 with a modest constant
  if (r.size() >= 3) {
    const double rk = r[r.size() - 2], rk1 = r.back();
    CHECK(rk1 <= 1e3 * rk * rk + 1e-15);
  }
}

TEST_CASE("discrete stability bound echoes the continuous estimate") {
  // ||grad y||_L2 <= nu^-1 * sup (u, v)/||grad v||: with u constant the sup
  // over discrete v vanishing on the boundary is bounded by the Poincare dual
  // norm; assert the computable surrogate with 5% slack
  const Mesh m = build_structured(8, 8);
  const MixedSpace s = build_space(m, ElementPair::TaylorHood);
  const double nu = 0.5;
  const StateSolution sol =
      solve_state(s, nu, cellwise([](const Vec2&) { return Vec2(1.0, -2.0); }));
  REQUIRE(sol.report.converged);
  const SparseMat K = assemble_viscous(s, 1.0);
  const double grad_norm = std::sqrt(sol.y.coefficients.dot(K * sol.y.coefficients));
  // surrogate dual norm: sup over FE functions of (f, v)/|v|_H1 computed from
  // the load vector and the H1 Gram matrix via one Laplace solve
  SaddleSystem lap;
  lap.A = K;
  lap.B = SparseMat(0, s.velocity_dof_count);
  lap.f = assemble_load(s, cellwise([](const Vec2&) { return Vec2(1.0, -2.0); }));
  lap.g = Eigen::VectorXd(0);
  apply_dirichlet(lap, s);
  MixedSpace nop = s;
  nop.pressure_dof_count = 0;
  const LinearSolution riesz = solve_saddle(lap, nop);
  const double dual_norm = std::sqrt(riesz.velocity.dot(lap.f));
  CHECK(grad_norm <= 1.05 * dual_norm / nu);
}

TEST_CASE("linearized solve: stokes reduction and homogeneous rhs") {
  const Mesh m = build_structured(4, 4);
  const MixedSpace s = build_space(m, ElementPair::TaylorHood);
  FeFunction zero{&s, Field::Velocity, Eigen::VectorXd::Zero(s.velocity_dof_count)};

  // g = 0 -> phi = 0
  const auto [phi0, zeta0] =
      solve_linearized(s, 1.0, zero, Eigen::VectorXd::Zero(s.velocity_dof_count));
  CHECK(phi0.coefficients.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(zeta0.coefficients.cwiseAbs().maxCoeff() < 1e-12);

  // at y = 0 the linearized operator is the Stokes operator
  const Eigen::VectorXd g =
      assemble_load(s, cellwise([](const Vec2& x) { return Vec2(x.y(), x.x()); }));
  const auto [phi, zeta] = solve_linearized(s, 1.0, zero, g);
  SaddleSystem stokes;
  stokes.A = assemble_viscous(s, 1.0);
  stokes.B = assemble_divergence(s);
  stokes.f = g;
  stokes.g = Eigen::VectorXd::Zero(s.pressure_dof_count);
  apply_dirichlet(stokes, s);
  stokes.f = g;
  for (int i = 0; i < s.velocity_dof_count; ++i)
    if (s.dirichlet_mask[i]) stokes.f[i] = 0.0;
  const LinearSolution ref = solve_saddle(stokes, s);
  CHECK((phi.coefficients - ref.velocity).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("linearized solve matches directional differences of the state map") {
  // moderate viscosity and an O(10) load so the convection terms matter and
  // the finite-difference defect sits well above roundoff
  const Mesh m = build_structured(8, 8);
  const MixedSpace s = build_space(m, ElementPair::TaylorHood);
  const double nu = 0.1;
  const auto u = [](const Vec2& x) { return Vec2(10.0 * x.x(), -10.0 * x.y()); };
  const auto gfun = [](const Vec2& x) { return Vec2(5.0 * x.y() * x.y(), 5.0); };
  const StateSolution base = solve_state(s, nu, cellwise(u));
  const Eigen::VectorXd g = assemble_load(s, cellwise(gfun));
  const auto [phi, zeta] = solve_linearized(s, nu, base.y, g);

  const SparseMat Mv = assemble_mass_velocity(s);
  auto l2 = [&](const Eigen::VectorXd& v) { return std::sqrt(v.dot(Mv * v)); };

  double prev_defect = 0.0;
  int k = 0;
  for (const double eps : {1e-2, 1e-3}) {
    const auto up = [&](const Vec2& x) { return Vec2(u(x) + eps * gfun(x)); };
    const auto um = [&](const Vec2& x) { return Vec2(u(x) - eps * gfun(x)); };
    StateOptions opts;
    opts.tol = 1e-12;
    const StateSolution sp = solve_state(s, nu, cellwise(up), opts);
    const StateSolution sm = solve_state(s, nu, cellwise(um), opts);
    const Eigen::VectorXd diff = (sp.y.coefficients - sm.y.coefficients) / (2.0 * eps);
    const double defect = l2(diff - phi.coefficients);
    if (k++ > 0) {
      // O(eps^2): a 10x smaller eps shrinks the defect by ~100x; allow 30x
      // with a floor for the solver-accuracy noise
      CHECK(defect <= std::max(prev_defect / 30.0, 1e-11));
    }
    prev_defect = defect;
  }
  CHECK(prev_defect < 1e-6);
}

TEST_CASE("small-viscosity solve converges, with continuation if needed") {
  const Mesh m = build_structured(8, 8);
  const MixedSpace s = build_space(m, ElementPair::TaylorHood);
  const auto load = [](const Vec2& x) {
    return Vec2(8.0 * (x.y() - 0.5), -8.0 * (x.x() - 0.5));
  };
  const StateSolution sol = solve_state(s, 0.02, cellwise(load));
  CHECK(sol.report.converged);
  CHECK(divergence_defect(s, sol.y) <=
        1e-9 * (1.0 + sol.y.coefficients.cwiseAbs().maxCoeff()));
}
