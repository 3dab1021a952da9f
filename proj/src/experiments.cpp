#include "nsopt/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "nsopt/errors.hpp"

namespace nsopt {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TrackingData default_tracking() {
  TrackingData d;
  d.points = {{0.25, 0.75}, {0.75, 0.75}, {0.5, 0.25}};
  d.targets = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}};
  return d;
}

ControlProblem ExperimentConfig::control_problem() const {
  ControlProblem p;
  p.nu = nu;
  p.alpha = alpha;
  p.lower = lower;
  p.upper = upper;
  p.tracking = tracking.points.empty() ? default_tracking() : tracking;
  p.scheme = scheme;
  p.pair = pair;
  return p;
}

void ExperimentConfig::validate() const {
  if (levels.empty()) throw ConfigError("config: at least one mesh level required");
  for (size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1])
      throw ConfigError("config: mesh levels must be strictly increasing");
  if (levels.front() < 1) throw ConfigError("config: mesh levels must be positive");
  if (reference_offset < 1)
    throw ConfigError("config: reference level must be strictly finer than all tested levels");
  if (!(domain[2] > domain[0]) || !(domain[3] > domain[1]))
    throw ConfigError("config: degenerate domain rectangle");
  control_problem().validate();
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("config: cannot parse number in '" + key + "'");
    }
  }
  if (out.empty()) throw ConfigError("config: empty value for '" + key + "'");
  return out;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line, section;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = strip(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected 'key = value': " + line);
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (!section.empty()) key = section + "." + key;
    kv[key] = value;
  }

  ExperimentConfig cfg;
  auto get = [&kv](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto get_double = [&](const std::string& key, double& target) {
    if (auto v = get(key)) target = parse_number_list(*v, key).at(0);
  };

  if (auto v = get("domain.rect")) {
    auto nums = parse_number_list(*v, "domain.rect");
    if (nums.size() != 4) throw ConfigError("config: domain.rect needs x0,y0,x1,y1");
    std::copy(nums.begin(), nums.end(), cfg.domain.begin());
  }
  if (auto v = get("mesh.levels")) {
    cfg.levels.clear();
    for (double n : parse_number_list(*v, "mesh.levels"))
      cfg.levels.push_back(static_cast<int>(n));
  }
  if (auto v = get("mesh.reference_offset"))
    cfg.reference_offset = static_cast<int>(parse_number_list(*v, "reference_offset").at(0));
  get_double("problem.nu", cfg.nu);
  get_double("problem.alpha", cfg.alpha);
  if (auto v = get("problem.lower")) {
    auto nums = parse_number_list(*v, "problem.lower");
    if (nums.size() != 2) throw ConfigError("config: problem.lower needs two components");
    cfg.lower = Vec2(nums[0], nums[1]);
  }
  if (auto v = get("problem.upper")) {
    auto nums = parse_number_list(*v, "problem.upper");
    if (nums.size() != 2) throw ConfigError("config: problem.upper needs two components");
    cfg.upper = Vec2(nums[0], nums[1]);
  }
  if (auto v = get("tracking.points")) {
    auto nums = parse_number_list(*v, "tracking.points");
    if (nums.size() % 2 != 0) throw ConfigError("config: tracking.points needs x,y pairs");
    cfg.tracking.points.clear();
    for (size_t i = 0; i < nums.size(); i += 2)
      cfg.tracking.points.emplace_back(nums[i], nums[i + 1]);
  }
  if (auto v = get("tracking.targets")) {
    auto nums = parse_number_list(*v, "tracking.targets");
    if (nums.size() != 2 * cfg.tracking.points.size())
      throw ConfigError("config: tracking.targets must match tracking.points");
    cfg.tracking.targets.clear();
    for (size_t i = 0; i < nums.size(); i += 2)
      cfg.tracking.targets.emplace_back(nums[i], nums[i + 1]);
  }
  if (auto v = get("discretization.pair")) {
    if (*v == "th") cfg.pair = ElementPair::TaylorHood;
    else if (*v == "mini") cfg.pair = ElementPair::Mini;
    else throw ConfigError("config: discretization.pair must be th or mini");
  }
  if (auto v = get("discretization.scheme")) {
    if (*v == "fully") cfg.scheme = Scheme::FullyDiscrete;
    else if (*v == "semi") cfg.scheme = Scheme::Semidiscrete;
    else throw ConfigError("config: discretization.scheme must be fully or semi");
  }
  get_double("solver.newton_tol", cfg.newton_tol);
  get_double("solver.opt_tol", cfg.opt_tol);
  if (auto v = get("solver.opt_max_iter"))
    cfg.opt_max_iter = static_cast<int>(parse_number_list(*v, "opt_max_iter").at(0));
  if (auto v = get("solver.strategy")) {
    if (*v == "pg") cfg.strategy = OptStrategy::ProjectedGradientArmijo;
    else if (*v == "fixed-point") cfg.strategy = OptStrategy::DampedFixedPoint;
    else throw ConfigError("config: solver.strategy must be pg or fixed-point");
  }
  if (auto v = get("checks.seed"))
    cfg.seed = static_cast<unsigned>(parse_number_list(*v, "seed").at(0));
  if (auto v = get("output.path")) cfg.out_path = *v;
  if (auto v = get("output.format")) {
    if (*v != "csv" && *v != "json") throw ConfigError("config: output.format must be csv or json");
    cfg.format = *v;
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// convergence tables

double ConvergenceTable::eoc(double e_prev, double e_cur, double h_prev, double h_cur) {
  return std::log(e_prev / e_cur) / std::log(h_prev / h_cur);
}

namespace {

std::vector<double> eoc_of(const ConvergenceTable& t, double ConvergenceTable::Row::*member) {
  std::vector<double> out(t.rows.size(), 0.0);
  for (size_t k = 1; k < t.rows.size(); ++k)
    out[k] = ConvergenceTable::eoc(t.rows[k - 1].*member, t.rows[k].*member,
                                   t.rows[k - 1].h, t.rows[k].h);
  return out;
}

}  // namespace

std::vector<double> ConvergenceTable::eoc_u() const { return eoc_of(*this, &Row::e_u_L2); }
std::vector<double> ConvergenceTable::eoc_y() const { return eoc_of(*this, &Row::e_y_L2); }
std::vector<double> ConvergenceTable::eoc_yinf() const { return eoc_of(*this, &Row::e_y_Linf); }
std::vector<double> ConvergenceTable::eoc_z() const { return eoc_of(*this, &Row::e_z_L2); }

void emit_csv(const ConvergenceTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("emit_csv: cannot open " + path);
  out << "h,e_u_L2,eoc_u,e_y_L2,eoc_y,e_y_Linf,eoc_yinf,e_z_L2,eoc_z\n";
  const auto eu = table.eoc_u(), ey = table.eoc_y(), eyi = table.eoc_yinf(), ez = table.eoc_z();
  for (size_t k = 0; k < table.rows.size(); ++k) {
    const auto& r = table.rows[k];
    out << fmt17(r.h) << ',' << fmt17(r.e_u_L2) << ',' << fmt17(eu[k]) << ','
        << fmt17(r.e_y_L2) << ',' << fmt17(ey[k]) << ',' << fmt17(r.e_y_Linf) << ','
        << fmt17(eyi[k]) << ',' << fmt17(r.e_z_L2) << ',' << fmt17(ez[k]) << '\n';
  }
}

void emit_json(const ConvergenceTable& table, const std::string& path) {
  nlohmann::json rows = nlohmann::json::array();
  const auto eu = table.eoc_u(), ey = table.eoc_y(), eyi = table.eoc_yinf(), ez = table.eoc_z();
  for (size_t k = 0; k < table.rows.size(); ++k) {
    const auto& r = table.rows[k];
    rows.push_back({{"h", r.h},
                    {"e_u_L2", r.e_u_L2},
                    {"eoc_u", eu[k]},
                    {"e_y_L2", r.e_y_L2},
                    {"eoc_y", ey[k]},
                    {"e_y_Linf", r.e_y_Linf},
                    {"eoc_yinf", eyi[k]},
                    {"e_z_L2", r.e_z_L2},
                    {"eoc_z", ez[k]}});
  }
  std::ofstream out(path);
  if (!out) throw InputError("emit_json: cannot open " + path);
  out << nlohmann::json{{"rows", rows}}.dump(2) << "\n";
}

ConvergenceTable parse_table_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("parse_table_json: cannot open " + path);
  nlohmann::json j;
  in >> j;
  ConvergenceTable t;
  for (const auto& row : j.at("rows")) {
    ConvergenceTable::Row r;
    r.h = row.at("h");
    r.e_u_L2 = row.at("e_u_L2");
    r.e_y_L2 = row.at("e_y_L2");
    r.e_y_Linf = row.at("e_y_Linf");
    r.e_z_L2 = row.at("e_z_L2");
    t.rows.push_back(r);
  }
  return t;
}

// ---------------------------------------------------------------------------
// studies

std::vector<double> StateVerification::eoc_h1() const {
  std::vector<double> out(e_h1.size(), 0.0);
  for (size_t k = 1; k < e_h1.size(); ++k)
    out[k] = ConvergenceTable::eoc(e_h1[k - 1], e_h1[k], table.rows[k - 1].h, table.rows[k].h);
  return out;
}

StateVerification run_verify_state(const ExperimentConfig& config) {
  config.validate();
  StateVerification out;
  const ManufacturedSolution exact{config.nu};
  for (int n : config.levels) {
    const Mesh mesh = build_structured(n, n, config.domain);
    ConvergenceTable::Row row;
    row.h = mesh.h_max;
    bool ok = true;
    try {
      const MixedSpace space = build_space(mesh, config.pair);
      StateOptions sopts;
      sopts.tol = config.newton_tol;
      const StateSolution sol = solve_state(
          space, config.nu, cellwise([&exact](const Vec2& x) { return exact.load(x); }), sopts);
      const ErrorNorms e = velocity_error_norms(
          sol.y, [&exact](const Vec2& x) { return exact.velocity(x); },
          [&exact](const Vec2& x) { return exact.velocity_gradient(x); });
      row.e_y_L2 = e.l2;
      row.e_y_Linf = e.linf;
      out.e_h1.push_back(e.h1_semi);
    } catch (const std::exception&) {
      ok = false;
      out.e_h1.push_back(0.0);
    }
    out.table.rows.push_back(row);
    out.level_ok.push_back(ok);
  }
  return out;
}

std::function<Vec2(const Vec2&)> control_view(const ControlProblem& problem,
                                              const ControlIterate& control,
                                              const MixedSpace& space) {
  if (control.scheme == Scheme::FullyDiscrete) {
    const Mesh* mesh = space.mesh;
    return [mesh, values = control.values](const Vec2& x) {
      return values[locate_point(*mesh, x).cell_index];
    };
  }
  if (!control.closure_z)
    throw InputError("control_view: semidiscrete control lacks its adjoint closure");
  return [z = control.closure_z, alpha = problem.alpha, a = problem.lower,
          b = problem.upper](const Vec2& x) {
    return project_box(Vec2(-evaluate_velocity(*z, x) / alpha), a, b);
  };
}

namespace {

/// L2 distance of two control fields, quadrature on the (finer) mesh given.
double control_l2_distance(const std::function<Vec2(const Vec2&)>& u1,
                           const std::function<Vec2(const Vec2&)>& u2, const Mesh& mesh) {
  const QuadratureRule& rule = quadrature(4);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cells[c];
    const Vec2& p0 = mesh.vertices[t[0]];
    const Eigen::Matrix2d J = mesh.cell_jacobian(c);
    const double two_area = 2.0 * mesh.cell_area(c);
    for (int q = 0; q < rule.size(); ++q) {
      const auto& bary = rule.points[q];
      const Vec2 x = p0 + J * Eigen::Vector2d(bary[1], bary[2]);
      sum += rule.weights[q] * two_area * (u1(x) - u2(x)).squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double velocity_linf_distance(const FeFunction& coarse, const FeFunction& fine) {
  const Mesh& mesh = *fine.space->mesh;
  const QuadratureRule& rule = quadrature(8);
  double worst = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cells[c];
    const Vec2& p0 = mesh.vertices[t[0]];
    const Eigen::Matrix2d J = mesh.cell_jacobian(c);
    for (int q = 0; q < rule.size(); ++q) {
      const auto& bary = rule.points[q];
      const Vec2 x = p0 + J * Eigen::Vector2d(bary[1], bary[2]);
      worst = std::max(worst, (evaluate_velocity_local(fine, c, bary) -
                               evaluate_velocity(coarse, x))
                                  .lpNorm<Eigen::Infinity>());
    }
  }
  return worst;
}

}  // namespace

ControlStudy run_control_study(const ExperimentConfig& config) {
  config.validate();
  ControlStudy out;
  ControlProblem problem = config.control_problem();

  OptimizeOptions oopts;
  oopts.tol = config.opt_tol;
  oopts.max_iter = config.opt_max_iter;
  oopts.strategy = config.strategy;
  oopts.newton_tol = config.newton_tol;

  const int n_ref = config.levels.back() * (1 << config.reference_offset);
  out.reference_mesh =
      std::make_shared<Mesh>(build_structured(n_ref, n_ref, config.domain));
  out.reference_space =
      std::make_shared<MixedSpace>(build_space(*out.reference_mesh, config.pair));
  const Mesh& mesh_ref = *out.reference_mesh;
  out.reference = optimize(problem, *out.reference_space, oopts);
  const auto u_ref = control_view(problem, out.reference.control, *out.reference_space);

  for (int n : config.levels) {
    const Mesh mesh = build_structured(n, n, config.domain);
    ConvergenceTable::Row row;
    row.h = mesh.h_max;
    bool ok = true;
    try {
      const MixedSpace space = build_space(mesh, config.pair);
      const OptimizationResult res = optimize(problem, space, oopts);
      const auto u_h = control_view(problem, res.control, space);
      row.e_u_L2 = control_l2_distance(u_h, u_ref, mesh_ref);
      row.e_y_L2 = velocity_l2_distance(res.state.y, out.reference.state.y);
      row.e_y_Linf = velocity_linf_distance(res.state.y, out.reference.state.y);
      row.e_z_L2 = velocity_l2_distance(res.adjoint.z, out.reference.adjoint.z);
    } catch (const std::exception&) {
      ok = false;
    }
    out.table.rows.push_back(row);
    out.level_ok.push_back(ok);
  }
  return out;
}

DerivativeChecks run_derivative_checks(const ExperimentConfig& config) {
  config.validate();
  DerivativeChecks out;
  ControlProblem problem = config.control_problem();
  const int n = config.levels.front();
  const Mesh mesh = build_structured(n, n, config.domain);
  const MixedSpace space = build_space(mesh, config.pair);
  std::mt19937 rng(config.seed);

  // base control: a mildly interesting feasible point
  ControlIterate u = random_feasible_control(problem, space, rng);
  for (auto& v : u.values) v *= 0.5;

  const GradientResult grad = reduced_gradient(problem, space, u);
  const double j0 = cost(problem, space, grad.state.y, u);

  // gradient: central differences in random feasible directions
  out.gradient_error = 0.0;
  for (int dir = 0; dir < 5; ++dir) {
    ControlIterate g = random_feasible_control(problem, space, rng);
    const double dd = control_inner_product(space, grad.d, g);
    double best = std::numeric_limits<double>::infinity();
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      ControlIterate up = u, um = u;
      for (size_t i = 0; i < u.values.size(); ++i) {
        up.values[i] += eps * g.values[i];
        um.values[i] -= eps * g.values[i];
      }
      const double jp = reduced_cost(problem, space, up, &grad.state.y);
      const double jm = reduced_cost(problem, space, um, &grad.state.y);
      best = std::min(best, std::abs((jp - jm) / (2.0 * eps) - dd));
    }
    out.gradient_tol = 1e-6 * (1.0 + std::abs(dd));
    out.gradient_error = std::max(out.gradient_error, best / (1.0 + std::abs(dd)));
  }
  out.gradient_ok = out.gradient_error <= 1e-6;

  // curvature: second differences at eps = 1e-3
  out.hessian_error = 0.0;
  for (int dir = 0; dir < 3; ++dir) {
    ControlIterate g = random_feasible_control(problem, space, rng);
    const double j2 = second_order_value(problem, space, u, g);
    const double eps = 1e-3;
    ControlIterate up = u, um = u;
    for (size_t i = 0; i < u.values.size(); ++i) {
      up.values[i] += eps * g.values[i];
      um.values[i] -= eps * g.values[i];
    }
    const double jp = reduced_cost(problem, space, up, &grad.state.y);
    const double jm = reduced_cost(problem, space, um, &grad.state.y);
    const double quotient = (jp - 2.0 * j0 + jm) / (eps * eps);
    out.hessian_error =
        std::max(out.hessian_error, std::abs(quotient - j2) / (1.0 + std::abs(j2)));
  }
  out.hessian_ok = out.hessian_error <= 1e-4;

  // transpose consistency: for the linearized solve L phi = f and the adjoint
  // solve L^T z = g, the duality g . phi = f . z must hold
  {
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
      Eigen::VectorXd f(space.velocity_dof_count), g(space.velocity_dof_count);
      for (int i = 0; i < f.size(); ++i) {
        f[i] = space.dirichlet_mask[i] ? 0.0 : gauss(rng);
        g[i] = space.dirichlet_mask[i] ? 0.0 : gauss(rng);
      }
      const auto [phi, zeta] = solve_linearized(space, problem.nu, grad.state.y, f);
      const auto [z, r] = solve_adjoint_with_rhs(space, problem.nu, grad.state.y, g);
      const double a = g.dot(phi.coefficients);
      const double b = f.dot(z.coefficients);
      worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}));
    }
    out.transpose_error = worst;
    out.transpose_ok = worst <= 1e-12;
  }
  return out;
}

bool InfSupReport::positive() const {
  for (double b : beta)
    if (!(b > 0.0)) return false;
  return !beta.empty();
}

double InfSupReport::worst_decay() const {
  double worst = 0.0;
  for (size_t k = 1; k < beta.size(); ++k)
    worst = std::max(worst, (beta[k - 1] - beta[k]) / beta[k - 1]);
  return worst;
}

InfSupReport run_infsup_diagnostic(const ExperimentConfig& config) {
  config.validate();
  InfSupReport out;
  out.pair = config.pair;
  for (int n : config.levels) {
    if (n > 16) throw DiagnosticError("run_infsup_diagnostic: dense eigen-solve limited to 16x16");
    const Mesh mesh = build_structured(n, n, config.domain);
    const MixedSpace space = build_space(mesh, config.pair);

    SaddleSystem sys;
    sys.A = assemble_viscous(space, 1.0);
    sys.B = assemble_divergence(space);
    sys.f = Eigen::VectorXd::Zero(space.velocity_dof_count);
    sys.g = Eigen::VectorXd::Zero(space.pressure_dof_count);
    apply_dirichlet(sys, space);

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(Eigen::SparseMatrix<double>(sys.A));
    if (lu.info() != Eigen::Success)
      throw DiagnosticError("run_infsup_diagnostic: stiffness factorization failed");
    const Eigen::MatrixXd Bt = Eigen::MatrixXd(sys.B).transpose();
    const Eigen::MatrixXd KinvBt = lu.solve(Bt);
    Eigen::MatrixXd S = Eigen::MatrixXd(sys.B) * KinvBt;
    S = 0.5 * (S + S.transpose()).eval();
    const Eigen::MatrixXd Mp = Eigen::MatrixXd(assemble_mass_pressure(space));

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Mp);
    if (eig.info() != Eigen::Success)
      throw DiagnosticError("run_infsup_diagnostic: eigen-solve failed");
    // smallest eigenvalue is the deflated constant-pressure mode
    out.h.push_back(mesh.h_max);
    out.beta.push_back(std::sqrt(std::max(0.0, eig.eigenvalues()[1])));
  }
  return out;
}

}  // namespace nsopt
