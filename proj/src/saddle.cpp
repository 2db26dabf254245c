#include "velast/saddle.hpp"

#include <algorithm>
#include <cmath>

#include "velast/errors.hpp"

namespace velast {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kDegenerateRel = 1e-14;

double inf_norm(const SparseMatrix& a) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      row_sums[it.row()] += std::abs(it.value());
  return a.rows() == 0 ? 0.0 : row_sums.maxCoeff();
}

}  // namespace

BorderedSolver::BorderedSolver(const SparseMatrix& a) : a_(a) {
  a_.makeCompressed();
  a_norm_ = inf_norm(a_);
  ldlt_.compute(a_);
  if (ldlt_.info() != Eigen::Success)
    throw SingularMatrix("sparse LDL^T factorization of the operator failed");
}

NodalField BorderedSolver::solve_spd(const NodalField& rhs) const {
  return ldlt_.solve(rhs);
}

SaddleSolution BorderedSolver::solve(const NodalField& b_row,
                                     const NodalField& rhs, double h) const {
  const NodalField x1 = ldlt_.solve(rhs);
  const NodalField x2 = ldlt_.solve(b_row);
  const double bx2 = b_row.dot(x2);
  if (bx2 <= kDegenerateRel * b_row.squaredNorm())
    throw DegenerateConstraint(
        "constraint row is invisible to the operator (b A^-1 b ~ 0)");

  SaddleSolution out;
  const double bx1 = b_row.dot(x1);
  out.p = (bx1 - h) / bx2;
  out.v = x1 - out.p * x2;

  // Residual-based postcondition; catches silent factorization breakdown
  // (e.g. zero pivots turning the solve into inf/nan). The scales use the
  // Schur terms before cancellation: v = x1 - p x2 may be tiny relative to
  // its parents (a pure normal pressure load produces p without motion),
  // and the roundoff of that cancellation is not a solver failure.
  const double momentum_res = (a_ * out.v + out.p * b_row - rhs).norm();
  const double momentum_scale =
      std::max({rhs.norm(),
                a_norm_ * (x1.norm() + std::abs(out.p) * x2.norm()) +
                    std::abs(out.p) * b_row.norm(),
                1e-300});
  const double constraint_res = std::abs(b_row.dot(out.v) - h);
  const double constraint_scale =
      std::max({std::abs(h), std::abs(bx1), std::abs(out.p * bx2),
                b_row.norm() * out.v.norm(), 1e-300});
  if (!(momentum_res <= kResidualTol * momentum_scale) ||
      !(constraint_res <= kResidualTol * constraint_scale))
    throw SingularMatrix("bordered solve residual exceeds 1e-10 relative");
  return out;
}

SaddleSolution solve_bordered(const BorderedSystem& sys) {
  return BorderedSolver(sys.a).solve(sys.b_row, sys.rhs, sys.h);
}

double recover_multiplier(const Mesh& mesh, const NodalField& g_vec) {
  double flux = 0.0;
  double length = 0.0;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    if (be.tag != 'N') continue;
    const double len = edge_length(mesh, static_cast<int>(e));
    const Eigen::Vector2d avg =
        0.5 * (g_vec.segment<2>(DofMap::dof(be.a, 0)) +
               g_vec.segment<2>(DofMap::dof(be.b, 0)));
    flux += len * avg.dot(edge_normal(mesh, static_cast<int>(e)));
    length += len;
  }
  return flux / length;
}

double recover_multiplier(const Mesh& mesh,
                          const std::vector<Eigen::Vector2d>& g_per_edge) {
  double flux = 0.0;
  double length = 0.0;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    if (mesh.boundary_edges[e].tag != 'N') continue;
    const double len = edge_length(mesh, static_cast<int>(e));
    flux += len * g_per_edge[e].dot(edge_normal(mesh, static_cast<int>(e)));
    length += len;
  }
  return flux / length;
}

}  // namespace velast
