#pragma once

#include <memory>
#include <random>

#include "nsopt/adjoint.hpp"

namespace nsopt {

/// FullyDiscrete: piecewise-constant controls per cell. Semidiscrete: the
/// control space is not discretized; iterates are carried by their values at
/// the assembly quadrature points and the converged control is the clamped
/// scaled adjoint.
enum class Scheme { FullyDiscrete, Semidiscrete };

enum class OptStrategy { ProjectedGradientArmijo, DampedFixedPoint };

struct ControlProblem {
  double nu = 1.0;
  double alpha = 0.1;
  Vec2 lower{-1.0, -1.0};
  Vec2 upper{1.0, 1.0};
  TrackingData tracking;
  Scheme scheme = Scheme::FullyDiscrete;
  ElementPair pair = ElementPair::TaylorHood;

  void validate() const;
};

/// A control (or control-space direction) in its scheme representation:
/// one value per cell for FullyDiscrete, one value per assembly quadrature
/// point (cell-major) for Semidiscrete. A converged semidiscrete control
/// additionally carries the adjoint whose clamp it is.
struct ControlIterate {
  Scheme scheme = Scheme::FullyDiscrete;
  std::vector<Vec2> values;
  std::shared_ptr<FeFunction> closure_z;  //< semidiscrete closure, may be null
};

Vec2 project_box(const Vec2& v, const Vec2& a, const Vec2& b);
ControlIterate project_box(ControlIterate u, const Vec2& a, const Vec2& b);

/// Per-entry L2 quadrature weights of the control representation: cell areas
/// (FullyDiscrete) or scaled quadrature weights (Semidiscrete).
Eigen::VectorXd control_weights(const MixedSpace& space, Scheme scheme);

double control_inner_product(const MixedSpace& space, const ControlIterate& u,
                             const ControlIterate& v);
double control_l2_norm(const MixedSpace& space, const ControlIterate& u);

/// Evaluation handle for assembly and cost quadrature. Semidiscrete iterates
/// may only be evaluated at the assembly quadrature points of their own mesh.
CellwiseFn control_as_load(const ControlIterate& u, const MixedSpace& space);

ControlIterate zero_control(const MixedSpace& space, Scheme scheme);

/// L2-orthogonal projection onto piecewise constants: per-cell mean by
/// quadrature.
std::vector<Vec2> project_l2_piecewise_constant(const MixedSpace& space, const CellwiseFn& f);

/// J(y, u) = 1/2 sum_t |y(t) - y_t|^2 + alpha/2 ||u||^2.
double cost(const ControlProblem& problem, const MixedSpace& space, const FeFunction& y,
            const ControlIterate& u);

struct GradientResult {
  ControlIterate d;  //< Riesz representative of j' in the control representation
  StateSolution state;
  AdjointSolution adjoint;
};

/// Solves state and adjoint at u and forms d = z + alpha u (cell averages of
/// z for FullyDiscrete).
GradientResult reduced_gradient(const ControlProblem& problem, const MixedSpace& space,
                                const ControlIterate& u,
                                const FeFunction* warm_start = nullptr);

struct OptimizeOptions {
  double tol = 1e-9;  //< on the projected-gradient stationarity measure
  int max_iter = 200;
  OptStrategy strategy = OptStrategy::ProjectedGradientArmijo;
  double newton_tol = 1e-11;
};

struct OptimizationResult {
  ControlIterate control;
  StateSolution state;
  AdjointSolution adjoint;
  std::vector<double> cost_history;
  double vi_residual = 0.0;  //< stationarity measure at the final iterate
  int iterations = 0;
  bool converged = false;
};

OptimizationResult optimize(const ControlProblem& problem, const MixedSpace& space,
                            const OptimizeOptions& opts = {});

/// Curvature j''(u) g^2 = alpha ||g||^2 - 2 b(phi; phi, z) + sum_t |phi(t)|^2
/// with phi the linearized state in direction g.
double second_order_value(const ControlProblem& problem, const MixedSpace& space,
                          const ControlIterate& u, const ControlIterate& g);

/// j_h(u): state solve followed by cost evaluation.
double reduced_cost(const ControlProblem& problem, const MixedSpace& space,
                    const ControlIterate& u, const FeFunction* warm_start = nullptr);

/// Uniform random control with componentwise values in [a, b].
ControlIterate random_feasible_control(const ControlProblem& problem, const MixedSpace& space,
                                       std::mt19937& rng);

/// Trilinear form b(v1; v2, v3) = ((v1 . grad) v2, v3) by assembly quadrature.
double trilinear_form(const MixedSpace& space, const FeFunction& v1, const FeFunction& v2,
                      const FeFunction& v3);

}  // namespace nsopt
