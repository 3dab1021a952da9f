#include "nsopt/sparse_linalg.hpp"

#include <Eigen/SparseLU>

#include "nsopt/errors.hpp"

namespace nsopt {

namespace {

/// Full block matrix [A -B^T; B 0] in column-major form for SparseLU.
Eigen::SparseMatrix<double> block_matrix(const SaddleSystem& sys, bool pin_pressure) {
  const int nv = static_cast<int>(sys.A.rows());
  const int np = static_cast<int>(sys.B.rows());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sys.A.nonZeros() + 2 * sys.B.nonZeros() + 1);
  for (int row = 0; row < sys.A.outerSize(); ++row)
    for (SparseMat::InnerIterator it(sys.A, row); it; ++it)
      trip.emplace_back(row, static_cast<int>(it.col()), it.value());
  for (int row = 0; row < sys.B.outerSize(); ++row) {
    const bool pinned_row = pin_pressure && row == 0;
    for (SparseMat::InnerIterator it(sys.B, row); it; ++it) {
      if (!pinned_row) trip.emplace_back(nv + row, static_cast<int>(it.col()), it.value());
      trip.emplace_back(static_cast<int>(it.col()), nv + row, -it.value());
    }
  }
  if (pin_pressure) trip.emplace_back(nv, nv, 1.0);
  Eigen::SparseMatrix<double> m(nv + np, nv + np);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace

LinearSolution solve_saddle(const SaddleSystem& sys, const MixedSpace& space) {
  const int nv = static_cast<int>(sys.A.rows());
  const int np = static_cast<int>(sys.B.rows());

  Eigen::VectorXd rhs(nv + np);
  rhs.head(nv) = sys.f;
  rhs.tail(np) = sys.g;

  const bool pin = sys.gauge == Gauge::PinFirstPressureDof && np > 0;
  if (!pin && np > 0) {
    // without the gauge the constant pressure spans a kernel whenever B^T
    // annihilates it; LU can still return a particular solution for a
    // consistent rhs, so check for the known nullspace up front
    const Eigen::VectorXd bt_one = sys.B.transpose() * Eigen::VectorXd::Ones(np);
    double bscale = 0.0;
    for (int k = 0; k < sys.B.outerSize(); ++k)
      for (SparseMat::InnerIterator it(sys.B, k); it; ++it)
        bscale = std::max(bscale, std::abs(it.value()));
    if (bt_one.cwiseAbs().maxCoeff() <= 1e-12 * std::max(bscale, 1.0))
      throw SolverError(
          "solve_saddle: singular system, constant pressure kernel (gauge not applied)");
  }
  Eigen::VectorXd rhs_solve = rhs;
  if (pin) rhs_solve[nv] = 0.0;

  const Eigen::SparseMatrix<double> M = block_matrix(sys, pin);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  if (lu.info() != Eigen::Success)
    throw SolverError("solve_saddle: factorization failed (singular system?)");
  Eigen::VectorXd x = lu.solve(rhs_solve);
  if (lu.info() != Eigen::Success) throw SolverError("solve_saddle: back-substitution failed");

  LinearSolution sol;
  sol.velocity = x.head(nv);
  sol.pressure = x.tail(np);

  // mean correction: reported pressure lies in L^2_0
  if (np > 0) {
    const Eigen::VectorXd w = pressure_basis_integrals(space);
    sol.pressure.array() -= w.dot(sol.pressure) / w.sum();
  }

  // recompute the residual against the unpinned saddle matrix; the constant
  // shift of the pressure does not change it
  const Eigen::SparseMatrix<double> M0 = block_matrix(sys, false);
  Eigen::VectorXd xc(nv + np);
  xc.head(nv) = sol.velocity;
  xc.tail(np) = sol.pressure;
  sol.residual_norm = (M0 * xc - rhs).norm();
  const double scale = rhs.norm();
  if (sol.residual_norm > kLinearResidualTol * std::max(scale, 1.0))
    throw SolverError("solve_saddle: residual target unmet", sol.residual_norm);
  return sol;
}

}  // namespace nsopt
