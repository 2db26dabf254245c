#pragma once

// P1 vector finite-element assembly on triangle meshes: mass, velocity
// diffusion, nonlinear internal force with exact tangent, boundary loads,
// the global volume functional and its constraint row.
//
// All element integrands (stress, det, cof) are constant per P1 element, so
// every volume integral here is exact; edge loads use 2-point Gauss, exact
// for the products that appear.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <functional>

#include "velast/materials.hpp"
#include "velast/mesh.hpp"

namespace velast {

using NodalField = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Node i owns dofs (2i, 2i+1) for (u_x, u_y); nodes on D-tagged edges are
// constrained to zero.
struct DofMap {
  int n_nodes = 0;
  std::vector<int> dirichlet_dofs;       // sorted, unique
  std::vector<bool> is_dirichlet;        // per dof

  int n_dofs() const { return 2 * n_nodes; }
  static int dof(int node, int component) { return 2 * node + component; }
};

DofMap make_dof_map(const Mesh& mesh);

// Constant P1 basis gradients and area of one triangle; column k of grad is
// the gradient of the hat function of local node k.
struct ElementGeometry {
  Eigen::Matrix<double, 2, 3> grad;
  double area = 0.0;
};

ElementGeometry element_geometry(const Mesh& mesh, int t);

// 2x2 displacement gradient of a nodal field on one element.
Mat2 element_grad(const Mesh& mesh, int t, const NodalField& u);

SparseMatrix assemble_mass(const Mesh& mesh);
SparseMatrix assemble_diffusion(const Mesh& mesh, double kappa);

// Residual of the internal-force weak form, r_i = -int sigma(grad u) : grad
// phi_i. This is exactly the negative gradient of the total stored energy,
// and it carries the sigma n boundary term of the traction condition in
// integrated-by-parts form.
NodalField assemble_internal_force(const Mesh& mesh, const MaterialModel& model,
                                   const NodalField& u);

// Derivative of assemble_internal_force with respect to u (for optional
// Newton acceleration).
SparseMatrix assemble_internal_force_jacobian(const Mesh& mesh,
                                              const MaterialModel& model,
                                              const NodalField& u);

// Traction datum g(x, t, n) integrated against basis functions over the
// N-tagged boundary. The outward normal is passed to the callback so normal
// pressure loads can be expressed without geometry lookups.
using BoundaryFunction =
    std::function<Eigen::Vector2d(const Eigen::Vector2d& x, double t,
                                  const Eigen::Vector2d& n)>;

NodalField assemble_neumann_load(const Mesh& mesh, const BoundaryFunction& g,
                                 double t);

// Volume function of (x, t) integrated against basis functions.
using VolumeFunction =
    std::function<Eigen::Vector2d(const Eigen::Vector2d& x, double t)>;

NodalField assemble_volume_load(const Mesh& mesh, const VolumeFunction& f,
                                double t);

// Constraint row b(u): b(u) . v = int_{Gamma_N} v . cof(Phi(u)) n dGamma.
// It doubles as the pressure column of the bordered step system.
NodalField assemble_constraint_row(const Mesh& mesh, const NodalField& u);

// sum_e area_e det(Phi_e) - exact current volume of the deformed body.
double enclosed_volume(const Mesh& mesh, const NodalField& u);

double min_det(const Mesh& mesh, const NodalField& u);

// Pressure part of the traction nonlinearity: int_{Gamma_N} p (I - cof Phi) n
// . phi_i dGamma. The sigma n part lives inside assemble_internal_force; the
// split is exposed separately below for tests.
NodalField nonlinear_boundary_rhs(const Mesh& mesh, const MaterialModel& model,
                                  const NodalField& u, double p);

// The sigma(grad u) n part of the boundary traction as an explicit edge
// integral (test/diagnostic view of the split).
NodalField sigma_normal_traction(const Mesh& mesh, const MaterialModel& model,
                                 const NodalField& u);

// Constraint datum H = int_{Gamma_N} v . (I - cof Phi(u)) n dGamma.
double constraint_rhs_H(const Mesh& mesh, const NodalField& u,
                        const NodalField& v);

// Row/column elimination with unit diagonal; idempotent and symmetric.
void apply_dirichlet(SparseMatrix& a, const DofMap& dofs);
void zero_dirichlet(NodalField& v, const DofMap& dofs);

// Nodal interpolation of a smooth field.
NodalField interpolate(const Mesh& mesh,
                       const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f);

double total_strain_energy(const Mesh& mesh, const MaterialModel& model,
                           const NodalField& u);

}  // namespace velast
