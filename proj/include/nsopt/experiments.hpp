#pragma once

#include <optional>
#include <string>

#include "nsopt/manufactured.hpp"
#include "nsopt/optimize.hpp"

namespace nsopt {

struct ExperimentConfig {
  std::array<double, 4> domain{0.0, 0.0, 1.0, 1.0};
  std::vector<int> levels{8, 16, 32};  //< nx = ny per level, strictly increasing
  int reference_offset = 2;            //< reference level = finest * 2^offset
  ElementPair pair = ElementPair::TaylorHood;
  Scheme scheme = Scheme::FullyDiscrete;
  double nu = 1.0;
  double alpha = 0.1;
  Vec2 lower{-0.75, -0.75};
  Vec2 upper{0.75, 0.75};
  TrackingData tracking;  //< defaults to the benchmark points if empty
  double newton_tol = 1e-10;
  double opt_tol = 1e-7;
  int opt_max_iter = 400;
  OptStrategy strategy = OptStrategy::DampedFixedPoint;
  unsigned seed = 1;
  std::string out_path;
  std::string format = "csv";

  ControlProblem control_problem() const;
  void validate() const;
};

/// Flat TOML-subset parser: `key = value` lines, `[section]` headers turning
/// into dotted key prefixes, `#` comments, comma-separated numeric lists.
ExperimentConfig parse_config(const std::string& path);

/// Benchmark tracking data used when the config leaves it empty.
TrackingData default_tracking();

struct ConvergenceTable {
  struct Row {
    double h = 0.0;
    double e_u_L2 = 0.0;
    double e_y_L2 = 0.0;
    double e_y_Linf = 0.0;
    double e_z_L2 = 0.0;
  };
  std::vector<Row> rows;

  static double eoc(double e_prev, double e_cur, double h_prev, double h_cur);
  std::vector<double> eoc_u() const;
  std::vector<double> eoc_y() const;
  std::vector<double> eoc_yinf() const;
  std::vector<double> eoc_z() const;
};

void emit_csv(const ConvergenceTable& table, const std::string& path);
void emit_json(const ConvergenceTable& table, const std::string& path);
ConvergenceTable parse_table_json(const std::string& path);

struct StateVerification {
  ConvergenceTable table;       //< state errors in the e_y columns
  std::vector<double> e_h1;     //< velocity H1 seminorm errors per level
  std::vector<double> eoc_h1() const;
  std::vector<bool> level_ok;   //< solver success per level
};

/// Manufactured-solution state verification across the configured levels.
StateVerification run_verify_state(const ExperimentConfig& config);

struct ControlStudy {
  ConvergenceTable table;
  std::shared_ptr<Mesh> reference_mesh;        //< keep the reference solution's
  std::shared_ptr<MixedSpace> reference_space; //< mesh and space alive
  OptimizationResult reference;                //< solution on the reference level
  std::vector<bool> level_ok;
};

/// Optimizes the benchmark problem on every level and on the reference level,
/// and measures control/state/adjoint errors against the reference.
ControlStudy run_control_study(const ExperimentConfig& config);

struct DerivativeChecks {
  double gradient_error = 0.0;    //< worst central-difference mismatch
  double gradient_tol = 0.0;
  double hessian_error = 0.0;     //< worst relative second-difference mismatch
  double transpose_error = 0.0;   //< relative transpose consistency defect
  bool gradient_ok = false;
  bool hessian_ok = false;
  bool transpose_ok = false;
  bool all_ok() const { return gradient_ok && hessian_ok && transpose_ok; }
};

DerivativeChecks run_derivative_checks(const ExperimentConfig& config);

struct InfSupReport {
  ElementPair pair;
  std::vector<double> h;
  std::vector<double> beta;
  bool positive() const;
  double worst_decay() const;  //< max relative drop per refinement
};

/// Discrete inf-sup constants beta_h = sqrt(lambda_min) of the pressure Schur
/// eigenproblem B K^-1 B^T q = lambda M_p q, with the constant-pressure mode
/// deflated.
InfSupReport run_infsup_diagnostic(const ExperimentConfig& config);

/// Pointwise control evaluation anywhere in the domain. FullyDiscrete
/// controls resolve their cell by point location; semidiscrete controls must
/// carry their closure.
std::function<Vec2(const Vec2&)> control_view(const ControlProblem& problem,
                                              const ControlIterate& control,
                                              const MixedSpace& space);

}  // namespace nsopt
