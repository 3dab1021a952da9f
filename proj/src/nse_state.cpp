#include "nsopt/nse_state.hpp"

#include <cmath>

#include "nsopt/errors.hpp"

namespace nsopt {

namespace {

FeFunction velocity_function(const MixedSpace& space, Eigen::VectorXd coeffs) {
  return {&space, Field::Velocity, std::move(coeffs)};
}

/// Nonlinear residual of the discrete momentum/continuity equations at
/// (y, p), with Dirichlet rows replaced by the boundary mismatch (zero for
/// iterates produced here). C1 is the convection linearization at y, so
/// C1 * y gives the convection term b(y; y, .).
Eigen::VectorXd nonlinear_residual(const MixedSpace& space, const SparseMat& A,
                                   const SparseMat& B, const SparseMat& C1,
                                   const Eigen::VectorXd& f, const FeFunction& y,
                                   const Eigen::VectorXd& p) {
  Eigen::VectorXd r_mom = A * y.coefficients + C1 * y.coefficients -
                          B.transpose() * p - f;
  for (int dof = 0; dof < space.velocity_dof_count; ++dof)
    if (space.dirichlet_mask[dof]) r_mom[dof] = y.coefficients[dof];
  Eigen::VectorXd r(space.velocity_dof_count + space.pressure_dof_count);
  r.head(space.velocity_dof_count) = r_mom;
  r.tail(space.pressure_dof_count) = B * y.coefficients;
  return r;
}

struct NewtonOutcome {
  bool converged = false;
  FeFunction y, p;
  NewtonReport report;
};

NewtonOutcome newton(const MixedSpace& space, double nu, const Eigen::VectorXd& load,
                     const SparseMat& B_masked, const FeFunction& y0, double tol,
                     int max_iter) {
  NewtonOutcome out;
  out.y = y0;
  out.p = FeFunction{&space, Field::Pressure,
                     Eigen::VectorXd::Zero(space.pressure_dof_count)};
  const SparseMat A = assemble_viscous(space, nu);
  const double scale = 1.0 + load.norm();

  for (int it = 0; it <= max_iter; ++it) {
    const auto [C1, C2] = assemble_convection(space, out.y);
    Eigen::VectorXd res =
        nonlinear_residual(space, A, B_masked, C1, load, out.y, out.p.coefficients);
    const double rnorm = res.norm();
    out.report.residual_history.push_back(rnorm);
    if (rnorm <= tol * scale) {
      out.converged = true;
      out.report.iterations = it;
      out.report.converged = true;
      return out;
    }
    if (it == max_iter) break;
    if (!std::isfinite(rnorm) || (it > 0 && rnorm > 1e4 * out.report.residual_history[0]))
      break;  // diverging, let continuation take over

    SaddleSystem sys;
    sys.A = A + SparseMat(C1 + C2);
    sys.B = B_masked;
    sys.f = -res.head(space.velocity_dof_count);
    sys.g = -res.tail(space.pressure_dof_count);
    sys.gauge = Gauge::PinFirstPressureDof;
    apply_dirichlet(sys, space);
    const LinearSolution step = solve_saddle(sys, space);
    out.y.coefficients += step.velocity;
    out.p.coefficients += step.pressure;
    out.report.iterations = it + 1;
  }
  return out;
}

FeFunction stokes_initial_guess(const MixedSpace& space, double nu,
                                const Eigen::VectorXd& load, const SparseMat& B_masked) {
  SaddleSystem sys;
  sys.A = assemble_viscous(space, nu);
  sys.B = B_masked;
  sys.f = load;
  sys.g = Eigen::VectorXd::Zero(space.pressure_dof_count);
  sys.gauge = Gauge::PinFirstPressureDof;
  apply_dirichlet(sys, space);
  return velocity_function(space, solve_saddle(sys, space).velocity);
}

SparseMat masked_divergence(const MixedSpace& space) {
  SparseMat B = assemble_divergence(space);
  for (int row = 0; row < B.outerSize(); ++row)
    for (SparseMat::InnerIterator it(B, row); it; ++it)
      if (space.dirichlet_mask[it.col()]) it.valueRef() = 0.0;
  B.prune(0.0);
  B.makeCompressed();
  return B;
}

}  // namespace

StateSolution solve_state(const MixedSpace& space, double nu, const CellwiseFn& u,
                          const StateOptions& opts) {
  if (!(nu > 0.0) || !(opts.tol > 0.0)) throw InputError("solve_state: nu, tol must be positive");
  const Eigen::VectorXd load_raw = assemble_load(space, u);
  Eigen::VectorXd load = load_raw;
  for (int dof = 0; dof < space.velocity_dof_count; ++dof)
    if (space.dirichlet_mask[dof]) load[dof] = 0.0;
  const SparseMat B = masked_divergence(space);

  FeFunction guess = opts.warm_start
                         ? *opts.warm_start
                         : stokes_initial_guess(space, nu, load, B);
  NewtonOutcome out = newton(space, nu, load, B, guess, opts.tol, opts.max_iter);

  if (!out.converged) {
    // continuation: converge at nu * 2^m, then halve nu back down
    for (int m = 1; m <= opts.max_continuation && !out.converged; ++m) {
      double nu_work = nu * std::pow(2.0, m);
      FeFunction y = stokes_initial_guess(space, nu_work, load, B);
      bool chain_ok = true;
      NewtonOutcome stage;
      while (true) {
        stage = newton(space, nu_work, load, B, y, opts.tol, opts.max_iter);
        if (!stage.converged) {
          chain_ok = false;
          break;
        }
        if (nu_work == nu) break;
        nu_work = std::max(nu, nu_work / 2.0);
        y = stage.y;
      }
      if (chain_ok && stage.converged) {
        stage.report.damping_used = true;
        out = stage;
      }
    }
    if (!out.converged)
      throw NonlinearSolveError("solve_state: Newton failed after continuation, residual " +
                                std::to_string(out.report.residual_history.back()));
  }
  return {std::move(out.y), std::move(out.p), std::move(out.report)};
}

SaddleSystem build_linearized_system(const MixedSpace& space, double nu, const FeFunction& y) {
  const auto [C1, C2] = assemble_convection(space, y);
  SaddleSystem sys;
  sys.A = assemble_viscous(space, nu) + SparseMat(C1 + C2);
  sys.B = assemble_divergence(space);
  sys.f = Eigen::VectorXd::Zero(space.velocity_dof_count);
  sys.g = Eigen::VectorXd::Zero(space.pressure_dof_count);
  sys.gauge = Gauge::PinFirstPressureDof;
  apply_dirichlet(sys, space);
  return sys;
}

std::pair<FeFunction, FeFunction> solve_linearized(const MixedSpace& space, double nu,
                                                   const FeFunction& at_y,
                                                   const Eigen::VectorXd& g) {
  SaddleSystem sys = build_linearized_system(space, nu, at_y);
  sys.f = g;
  for (int dof = 0; dof < space.velocity_dof_count; ++dof)
    if (space.dirichlet_mask[dof]) sys.f[dof] = 0.0;
  const LinearSolution sol = solve_saddle(sys, space);
  return {FeFunction{&space, Field::Velocity, sol.velocity},
          FeFunction{&space, Field::Pressure, sol.pressure}};
}

}  // namespace nsopt
