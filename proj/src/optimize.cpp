#include "nsopt/optimize.hpp"

#include <cmath>

#include "nsopt/errors.hpp"

namespace nsopt {

void ControlProblem::validate() const {
  if (!(alpha > 0.0)) throw InputError("ControlProblem: alpha must be positive");
  if (!(nu > 0.0)) throw InputError("ControlProblem: nu must be positive");
  if (!(lower.x() < upper.x()) || !(lower.y() < upper.y()))
    throw InputError("ControlProblem: bounds must satisfy a < b componentwise");
  if (tracking.points.size() != tracking.targets.size())
    throw InputError("ControlProblem: tracking points/targets size mismatch");
}

Vec2 project_box(const Vec2& v, const Vec2& a, const Vec2& b) {
  return v.cwiseMax(a).cwiseMin(b);
}

ControlIterate project_box(ControlIterate u, const Vec2& a, const Vec2& b) {
  for (auto& v : u.values) v = project_box(v, a, b);
  return u;
}

Eigen::VectorXd control_weights(const MixedSpace& space, Scheme scheme) {
  const Mesh& mesh = *space.mesh;
  if (scheme == Scheme::FullyDiscrete) {
    Eigen::VectorXd w(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) w[c] = mesh.cell_area(c);
    return w;
  }
  const QuadratureRule& rule = quadrature(kAssemblyQuadDegree);
  Eigen::VectorXd w(mesh.num_cells() * rule.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double two_area = 2.0 * mesh.cell_area(c);
    for (int q = 0; q < rule.size(); ++q)
      w[c * rule.size() + q] = rule.weights[q] * two_area;
  }
  return w;
}

double control_inner_product(const MixedSpace& space, const ControlIterate& u,
                             const ControlIterate& v) {
  if (u.scheme != v.scheme || u.values.size() != v.values.size())
    throw InputError("control_inner_product: representation mismatch");
  const Eigen::VectorXd w = control_weights(space, u.scheme);
  double sum = 0.0;
  for (size_t i = 0; i < u.values.size(); ++i) sum += w[i] * u.values[i].dot(v.values[i]);
  return sum;
}

double control_l2_norm(const MixedSpace& space, const ControlIterate& u) {
  return std::sqrt(std::max(0.0, control_inner_product(space, u, u)));
}

CellwiseFn control_as_load(const ControlIterate& u, const MixedSpace& space) {
  if (u.scheme == Scheme::FullyDiscrete) {
    return [values = u.values](int cell, const std::array<double, 3>&, const Vec2&) {
      return values[cell];
    };
  }
  const int nq = quadrature(kAssemblyQuadDegree).size();
  const QuadratureRule& rule = quadrature(kAssemblyQuadDegree);
  return [values = u.values, nq, &rule](int cell, const std::array<double, 3>& bary,
                                        const Vec2&) {
    // match the barycentric point against the assembly rule
    for (int q = 0; q < nq; ++q) {
      const auto& p = rule.points[q];
      if (std::abs(p[0] - bary[0]) < 1e-14 && std::abs(p[1] - bary[1]) < 1e-14)
        return values[cell * nq + q];
    }
    throw InputError("semidiscrete control evaluated off the assembly quadrature points");
  };
}

ControlIterate zero_control(const MixedSpace& space, Scheme scheme) {
  ControlIterate u;
  u.scheme = scheme;
  const size_t n = scheme == Scheme::FullyDiscrete
                       ? space.mesh->num_cells()
                       : space.mesh->num_cells() * quadrature(kAssemblyQuadDegree).size();
  u.values.assign(n, Vec2::Zero());
  return u;
}

std::vector<Vec2> project_l2_piecewise_constant(const MixedSpace& space, const CellwiseFn& f) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature(kAssemblyQuadDegree);
  std::vector<Vec2> out(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cells[c];
    const Vec2& p0 = mesh.vertices[t[0]];
    const Eigen::Matrix2d J = mesh.cell_jacobian(c);
    Vec2 acc = Vec2::Zero();
    for (int q = 0; q < rule.size(); ++q) {
      const auto& bary = rule.points[q];
      const Vec2 x = p0 + J * Eigen::Vector2d(bary[1], bary[2]);
      acc += rule.weights[q] * f(c, bary, x);
    }
    out[c] = 2.0 * acc;  // reference weights sum to 1/2, mean needs 1/|T| * integral
  }
  return out;
}

double cost(const ControlProblem& problem, const MixedSpace& space, const FeFunction& y,
            const ControlIterate& u) {
  problem.validate();
  double tracking = 0.0;
  for (size_t k = 0; k < problem.tracking.points.size(); ++k) {
    const Vec2 mismatch =
        evaluate_velocity(y, problem.tracking.points[k]) - problem.tracking.targets[k];
    tracking += 0.5 * mismatch.squaredNorm();
  }
  const double unorm = control_l2_norm(space, u);
  return tracking + 0.5 * problem.alpha * unorm * unorm;
}

namespace {

/// Cell averages of an FE velocity, as a fully discrete control object.
std::vector<Vec2> cell_averages(const MixedSpace& space, const FeFunction& v) {
  return project_l2_piecewise_constant(
      space, [&v](int cell, const std::array<double, 3>& bary, const Vec2&) {
        return evaluate_velocity_local(v, cell, bary);
      });
}

/// Values of an FE velocity at the assembly quadrature points, cell-major.
std::vector<Vec2> quad_point_values(const MixedSpace& space, const FeFunction& v) {
  const QuadratureRule& rule = quadrature(kAssemblyQuadDegree);
  std::vector<Vec2> out(space.mesh->num_cells() * rule.size());
  for (int c = 0; c < space.mesh->num_cells(); ++c)
    for (int q = 0; q < rule.size(); ++q)
      out[c * rule.size() + q] = evaluate_velocity_local(v, c, rule.points[q]);
  return out;
}

ControlIterate representative(const MixedSpace& space, Scheme scheme, const FeFunction& z) {
  ControlIterate d;
  d.scheme = scheme;
  d.values = scheme == Scheme::FullyDiscrete ? cell_averages(space, z)
                                             : quad_point_values(space, z);
  return d;
}

ControlIterate axpy(const ControlIterate& u, double s, const ControlIterate& d) {
  ControlIterate out = u;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += s * d.values[i];
  out.closure_z.reset();
  return out;
}

}  // namespace

GradientResult reduced_gradient(const ControlProblem& problem, const MixedSpace& space,
                                const ControlIterate& u, const FeFunction* warm_start) {
  problem.validate();
  StateOptions sopts;
  sopts.warm_start = warm_start;
  GradientResult out;
  out.state = solve_state(space, problem.nu, control_as_load(u, space), sopts);
  out.adjoint = solve_adjoint(space, problem.nu, out.state.y, problem.tracking);
  out.d = representative(space, u.scheme, out.adjoint.z);
  for (size_t i = 0; i < out.d.values.size(); ++i)
    out.d.values[i] += problem.alpha * u.values[i];
  return out;
}

double reduced_cost(const ControlProblem& problem, const MixedSpace& space,
                    const ControlIterate& u, const FeFunction* warm_start) {
  StateOptions sopts;
  sopts.warm_start = warm_start;
  const StateSolution state = solve_state(space, problem.nu, control_as_load(u, space), sopts);
  return cost(problem, space, state.y, u);
}

OptimizationResult optimize(const ControlProblem& problem, const MixedSpace& space,
                            const OptimizeOptions& opts) {
  problem.validate();
  OptimizationResult res;
  ControlIterate u = project_box(zero_control(space, problem.scheme), problem.lower,
                                 problem.upper);

  StateOptions sopts;
  sopts.tol = opts.newton_tol;
  StateSolution state = solve_state(space, problem.nu, control_as_load(u, space), sopts);
  double J = cost(problem, space, state.y, u);
  res.cost_history.push_back(J);

  constexpr double kArmijoSigma = 1e-4;
  double theta = 1.0;  // damped fixed point step

  AdjointSolution adj;
  for (int it = 0; it < opts.max_iter; ++it) {
    adj = solve_adjoint(space, problem.nu, state.y, problem.tracking);
    ControlIterate d = representative(space, problem.scheme, adj.z);
    for (size_t i = 0; i < d.values.size(); ++i) d.values[i] += problem.alpha * u.values[i];

    const ControlIterate u_stat = project_box(axpy(u, -1.0, d), problem.lower, problem.upper);
    res.vi_residual = control_l2_norm(space, axpy(u, -1.0, u_stat));
    if (res.vi_residual <= opts.tol) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    if (opts.strategy == OptStrategy::ProjectedGradientArmijo) {
      double s = 1.0 / problem.alpha;
      while (s >= 1e-12) {
        ControlIterate u_trial = project_box(axpy(u, -s, d), problem.lower, problem.upper);
        sopts.warm_start = &state.y;
        StateSolution state_trial =
            solve_state(space, problem.nu, control_as_load(u_trial, space), sopts);
        const double J_trial = cost(problem, space, state_trial.y, u_trial);
        const double decrease =
            control_inner_product(space, d, axpy(u_trial, -1.0, u));
        if (J_trial <= J + kArmijoSigma * decrease) {
          u = std::move(u_trial);
          state = std::move(state_trial);
          J = J_trial;
          accepted = true;
          break;
        }
        s *= 0.5;
      }
      if (!accepted) throw OptError("optimize: Armijo line search stagnated");
    } else {
      // u_next = (1 - theta) u + theta clamp(-z / alpha)
      ControlIterate target = representative(space, problem.scheme, adj.z);
      for (auto& v : target.values) v *= -1.0 / problem.alpha;
      target = project_box(std::move(target), problem.lower, problem.upper);
      while (theta >= 1e-8) {
        ControlIterate u_trial = axpy(axpy(u, -theta, u), theta, target);
        u_trial = project_box(std::move(u_trial), problem.lower, problem.upper);
        sopts.warm_start = &state.y;
        StateSolution state_trial =
            solve_state(space, problem.nu, control_as_load(u_trial, space), sopts);
        const double J_trial = cost(problem, space, state_trial.y, u_trial);
        if (J_trial <= J + 1e-14 * (1.0 + std::abs(J))) {
          u = std::move(u_trial);
          state = std::move(state_trial);
          J = J_trial;
          accepted = true;
          break;
        }
        theta *= 0.5;
      }
      if (!accepted) throw OptError("optimize: fixed-point damping stagnated");
    }
    res.cost_history.push_back(J);
    res.iterations = it + 1;
  }

  if (!res.converged && res.iterations >= opts.max_iter)
    throw OptError("optimize: no convergence within max_iter, stationarity " +
                   std::to_string(res.vi_residual));

  if (problem.scheme == Scheme::Semidiscrete) {
    // The converged control is, by definition of the scheme, the clamped
    // scaled adjoint; store the closure and its values.
    u.closure_z = std::make_shared<FeFunction>(adj.z);
    ControlIterate closure = representative(space, Scheme::Semidiscrete, adj.z);
    for (auto& v : closure.values) v = Vec2(-v / problem.alpha);
    closure = project_box(std::move(closure), problem.lower, problem.upper);
    u.values = std::move(closure.values);
  }
  res.control = std::move(u);
  res.state = std::move(state);
  res.adjoint = std::move(adj);
  return res;
}

double trilinear_form(const MixedSpace& space, const FeFunction& v1, const FeFunction& v2,
                      const FeFunction& v3) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = quadrature(kAssemblyQuadDegree);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double two_area = 2.0 * mesh.cell_area(c);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 a = evaluate_velocity_local(v1, c, rule.points[q]);
      const Eigen::Matrix2d g2 = evaluate_velocity_gradient_local(v2, c, rule.points[q]);
      const Vec2 b = evaluate_velocity_local(v3, c, rule.points[q]);
      sum += rule.weights[q] * two_area * (g2 * a).dot(b);
    }
  }
  return sum;
}

double second_order_value(const ControlProblem& problem, const MixedSpace& space,
                          const ControlIterate& u, const ControlIterate& g) {
  problem.validate();
  const GradientResult grad = reduced_gradient(problem, space, u);
  const Eigen::VectorXd mg = assemble_load(space, control_as_load(g, space));
  const auto [phi, zeta] = solve_linearized(space, problem.nu, grad.state.y, mg);
  const double gnorm = control_l2_norm(space, g);
  double point_terms = 0.0;
  for (const auto& t : problem.tracking.points)
    point_terms += evaluate_velocity(phi, t).squaredNorm();
  return problem.alpha * gnorm * gnorm - 2.0 * trilinear_form(space, phi, phi, grad.adjoint.z) +
         point_terms;
}

ControlIterate random_feasible_control(const ControlProblem& problem, const MixedSpace& space,
                                       std::mt19937& rng) {
  ControlIterate u = zero_control(space, problem.scheme);
  std::uniform_real_distribution<double> dx(problem.lower.x(), problem.upper.x());
  std::uniform_real_distribution<double> dy(problem.lower.y(), problem.upper.y());
  for (auto& v : u.values) v = Vec2(dx(rng), dy(rng));
  return u;
}

}  // namespace nsopt
