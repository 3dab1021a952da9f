// Command-line harness: verification studies, derivative checks, inf-sup
// diagnostics, and VTK export. Exit codes: 0 all checks pass, 1 a check
// failed, 2 configuration or usage error.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "nsopt/errors.hpp"
#include "nsopt/experiments.hpp"

namespace {

using namespace nsopt;

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::string scheme;
  std::string pair;
  std::string levels;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "configuration file");
  cmd->add_option("--out", flags.out_path, "output file path");
  cmd->add_option("--format", flags.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--scheme", flags.scheme, "control discretization scheme")
      ->check(CLI::IsMember({"fully", "semi"}));
  cmd->add_option("--pair", flags.pair, "mixed element pair")
      ->check(CLI::IsMember({"th", "mini"}));
  cmd->add_option("--levels", flags.levels, "comma-separated mesh levels (nx=ny)");
}

ExperimentConfig make_config(const CommonFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = parse_config(flags.config_path);
  if (!flags.out_path.empty()) cfg.out_path = flags.out_path;
  if (!flags.format.empty()) cfg.format = flags.format;
  if (!flags.scheme.empty())
    cfg.scheme = flags.scheme == "fully" ? Scheme::FullyDiscrete : Scheme::Semidiscrete;
  if (!flags.pair.empty())
    cfg.pair = flags.pair == "th" ? ElementPair::TaylorHood : ElementPair::Mini;
  if (!flags.levels.empty()) {
    cfg.levels.clear();
    std::stringstream ss(flags.levels);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        cfg.levels.push_back(std::stoi(item));
      } catch (const std::exception&) {
        throw ConfigError("cannot parse --levels entry '" + item + "'");
      }
    }
  }
  cfg.validate();
  return cfg;
}

void emit_table(const ConvergenceTable& table, const ExperimentConfig& cfg) {
  if (cfg.out_path.empty()) return;
  if (cfg.format == "json")
    emit_json(table, cfg.out_path);
  else
    emit_csv(table, cfg.out_path);
  std::cout << "wrote " << cfg.out_path << "\n";
}

int cmd_verify_state(const CommonFlags& flags) {
  const ExperimentConfig cfg = make_config(flags);
  const StateVerification v = run_verify_state(cfg);
  const auto eoc_l2 = v.table.eoc_y();
  const auto eoc_inf = v.table.eoc_yinf();
  const auto eoc_h1 = v.eoc_h1();
  std::printf("%10s %14s %8s %14s %8s %14s %8s\n", "h", "e_L2", "eoc", "e_H1", "eoc",
              "e_Linf", "eoc");
  bool ok = true;
  for (size_t k = 0; k < v.table.rows.size(); ++k) {
    const auto& r = v.table.rows[k];
    std::printf("%10.4e %14.6e %8.3f %14.6e %8.3f %14.6e %8.3f%s\n", r.h, r.e_y_L2,
                eoc_l2[k], v.e_h1[k], eoc_h1[k], r.e_y_Linf, eoc_inf[k],
                v.level_ok[k] ? "" : "  [solver failed]");
    ok = ok && v.level_ok[k];
  }
  emit_table(v.table, cfg);
  return ok ? 0 : 1;
}

int cmd_control_study(const CommonFlags& flags) {
  const ExperimentConfig cfg = make_config(flags);
  const ControlStudy s = run_control_study(cfg);
  const auto eu = s.table.eoc_u();
  const auto ey = s.table.eoc_y();
  const auto ez = s.table.eoc_z();
  std::printf("%10s %14s %8s %14s %8s %14s %8s\n", "h", "e_u_L2", "eoc", "e_y_L2", "eoc",
              "e_z_L2", "eoc");
  bool ok = true;
  for (size_t k = 0; k < s.table.rows.size(); ++k) {
    const auto& r = s.table.rows[k];
    std::printf("%10.4e %14.6e %8.3f %14.6e %8.3f %14.6e %8.3f%s\n", r.h, r.e_u_L2, eu[k],
                r.e_y_L2, ey[k], r.e_z_L2, ez[k],
                s.level_ok[k] ? "" : "  [solver failed]");
    ok = ok && s.level_ok[k];
  }
  emit_table(s.table, cfg);
  return ok ? 0 : 1;
}

int cmd_derivative_checks(const CommonFlags& flags) {
  const ExperimentConfig cfg = make_config(flags);
  const DerivativeChecks c = run_derivative_checks(cfg);
  std::printf("gradient  %-4s  relative error %.3e (tol 1e-6)\n",
              c.gradient_ok ? "PASS" : "FAIL", c.gradient_error);
  std::printf("curvature %-4s  relative error %.3e (tol 1e-4)\n",
              c.hessian_ok ? "PASS" : "FAIL", c.hessian_error);
  std::printf("transpose %-4s  relative error %.3e (tol 1e-12)\n",
              c.transpose_ok ? "PASS" : "FAIL", c.transpose_error);
  return c.all_ok() ? 0 : 1;
}

int cmd_infsup(const CommonFlags& flags) {
  ExperimentConfig cfg = make_config(flags);
  if (flags.levels.empty() && flags.config_path.empty()) cfg.levels = {4, 8, 16};
  const InfSupReport rep = run_infsup_diagnostic(cfg);
  std::printf("%10s %14s\n", "h", "beta_h");
  for (size_t k = 0; k < rep.h.size(); ++k)
    std::printf("%10.4e %14.8e\n", rep.h[k], rep.beta[k]);
  const bool ok = rep.positive() && rep.worst_decay() < 0.10;
  std::printf("inf-sup %s (worst decay per refinement %.2f%%)\n", ok ? "PASS" : "FAIL",
              100.0 * rep.worst_decay());
  return ok ? 0 : 1;
}

int cmd_export_vtk(const CommonFlags& flags) {
  ExperimentConfig cfg = make_config(flags);
  if (cfg.out_path.empty()) throw ConfigError("export-vtk requires --out");
  const int n = cfg.levels.front();
  const Mesh mesh = build_structured(n, n, cfg.domain);
  const MixedSpace space = build_space(mesh, cfg.pair);
  const ControlProblem problem = cfg.control_problem();

  OptimizeOptions oopts;
  oopts.tol = cfg.opt_tol;
  oopts.max_iter = cfg.opt_max_iter;
  oopts.strategy = cfg.strategy;
  oopts.newton_tol = cfg.newton_tol;
  const OptimizationResult res = optimize(problem, space, oopts);
  const auto u = control_view(problem, res.control, space);

  std::vector<Vec2> vel(mesh.num_vertices()), adj(mesh.num_vertices()), ctl(mesh.num_vertices());
  std::vector<double> pres(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2& x = mesh.vertices[v];
    vel[v] = evaluate_velocity(res.state.y, x);
    adj[v] = evaluate_velocity(res.adjoint.z, x);
    ctl[v] = u(x);
    pres[v] = evaluate_pressure(res.state.p, x);
  }
  write_vtk(mesh, cfg.out_path,
            {{"velocity", vel}, {"adjoint", adj}, {"control", ctl}},
            {{"pressure", pres}});
  std::cout << "wrote " << cfg.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed finite-element solver and optimization harness for "
               "pointwise-tracking Navier-Stokes control"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* verify = app.add_subcommand("verify-state", "manufactured-solution convergence study");
  auto* control = app.add_subcommand("control-study", "control convergence vs a fine reference");
  auto* deriv = app.add_subcommand("derivative-checks", "gradient/curvature/transpose checks");
  auto* infsup = app.add_subcommand("infsup", "discrete inf-sup diagnostic");
  auto* vtk = app.add_subcommand("export-vtk", "solve the benchmark and export fields");
  for (auto* cmd : {verify, control, deriv, infsup, vtk}) add_common(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return cmd_verify_state(flags);
    if (control->parsed()) return cmd_control_study(flags);
    if (deriv->parsed()) return cmd_derivative_checks(flags);
    if (infsup->parsed()) return cmd_infsup(flags);
    if (vtk->parsed()) return cmd_export_vtk(flags);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
