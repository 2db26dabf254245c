#pragma once

// Bordered KKT solves: a sparse SPD operator (mass/dt + damping after
// Dirichlet elimination) augmented with a single global constraint row,
// solved through a Schur complement on the factored operator. The
// factorization is computed once and reused for every right-hand side,
// matching the time stepper's pattern where the operator is fixed while
// loads and constraint data change per iteration.
//
// Also hosts the scalar-multiplier recovery primitive: the mean normal
// component of a traction datum over the traction boundary.

#include <Eigen/SparseCholesky>
#include <optional>
#include <vector>

#include "velast/assembly.hpp"

namespace velast {

struct BorderedSystem {
  SparseMatrix a;     // SPD after Dirichlet elimination
  NodalField b_row;   // constraint row; also the multiplier column
  NodalField rhs;
  double h = 0.0;     // constraint datum
};

struct SaddleSolution {
  NodalField v;
  double p = 0.0;
};

// Factors the operator once; solve() may then be called repeatedly with
// different constraint rows and data. Immutable after construction, so
// concurrent solves from several threads are safe.
class BorderedSolver {
 public:
  explicit BorderedSolver(const SparseMatrix& a);

  // Plain SPD solve A x = rhs (no constraint).
  NodalField solve_spd(const NodalField& rhs) const;

  // Solves [A b; b^T 0][v; p] = [rhs; h] via the Schur complement:
  //   x1 = A^-1 rhs, x2 = A^-1 b, p = (b.x1 - h)/(b.x2), v = x1 - p x2,
  // then verifies both KKT residuals to 1e-10 relative.
  SaddleSolution solve(const NodalField& b_row, const NodalField& rhs,
                       double h) const;

  int rows() const { return static_cast<int>(a_.rows()); }

 private:
  SparseMatrix a_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  double a_norm_ = 0.0;  // inf-norm, for residual scaling
};

// One-shot convenience wrapper around BorderedSolver.
SaddleSolution solve_bordered(const BorderedSystem& sys);

// (1/|Gamma_N|) int_{Gamma_N} g . n dGamma: the unique constant pressure
// whose normal traction best matches g. For g = c n it returns c exactly.
//
// Overloads: g as a P1 nodal field (trapezoid per edge, exact for P1 data),
// or as one constant vector per boundary edge (entries on D edges ignored).
double recover_multiplier(const Mesh& mesh, const NodalField& g_vec);
double recover_multiplier(const Mesh& mesh,
                          const std::vector<Eigen::Vector2d>& g_per_edge);

}  // namespace velast
