#pragma once

// Implicit time integration of the damped nonlinear elastodynamic system
// under the global volume constraint, with the hydraulic pressure as the
// constraint's scalar multiplier.
//
// Scheme: implicit Euler on the first-order form, u+ = u^n + dt v+, with an
// inner fixed-point loop: the nonlinearities (internal force, cofactor
// boundary terms) are frozen at the previous iterate and the resulting
// linear constrained parabolic problem goes through the bordered solver.
// The operator M/dt + kappa K is factored once per dt and reused.
//
// Constraint geometry: the volume row and the pressure column are evaluated
// at the half-step displacement u_mid = u^n + (dt/2) v. Because det is
// quadratic and cof linear in 2D, the half-step row turns the secant of the
// volume functional into an exact linear form:
//     b(u_mid(v)) . v = (vol(u^n + dt v) - vol(u^n)) / dt     exactly,
// so a converged step reproduces the reference volume to roundoff (the
// constraint datum carries the residual (vol_ref - vol(u^n))/dt, making the
// scheme self-correcting rather than drift-accumulating). The multiplier
// column matches the row, hence the constraint force does no work on any
// volume-preserving update. Both constraint modes below share this geometry
// and therefore share their fixed points; they differ only in how the work
// is split between the operator and the lagged right-hand side.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "velast/saddle.hpp"

namespace velast {

// How the volume constraint enters each linear solve:
//  - split_rhs: constraint row and pressure column stay at the reference
//    normals b(0); the geometric nonlinearity is lagged into the load
//    vector and the constraint datum (the fixed-point map of the
//    continuous analysis, taken verbatim).
//  - frozen_geometry: row and column are re-assembled at the current
//    iterate's half-step geometry; no lagged boundary terms.
enum class ConstraintMode { split_rhs, frozen_geometry };

struct State {
  double t = 0.0;
  NodalField u;    // displacement, zero on clamped dofs
  NodalField v;    // velocity, zero on clamped dofs
  double p = 0.0;  // hydraulic pressure (global scalar)
};

using InitialVelocity = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

struct SimConfig {
  double kappa = 1.0;   // velocity-diffusion damping
  double dt = 1e-3;
  double t_end = 0.5;
  double fp_tol = 1e-10;
  int fp_max_iters = 50;
  ConstraintMode constraint_mode = ConstraintMode::split_rhs;
  bool newton_accel = false;  // one Newton linearization of the internal force
  double dt_min = 1e-6;       // floor for step halving before giving up
  double rho = 1.0;           // fixed at 1; validated
  MaterialModel material = StVK{1.0, 1.0};
  VolumeFunction f;           // body force f(x, t); empty = zero
  BoundaryFunction g;         // boundary traction g(x, t, n); empty = zero
  InitialVelocity v0;         // initial velocity; empty = zero

  void validate() const;  // throws ConfigError with the offending key
};

struct StepReport {
  int fp_iterations = 0;
  double final_increment = 0.0;
  // ratio[k] = increment[k+1] / increment[k]; length fp_iterations - 1.
  std::vector<double> contraction_ratios;
  double volume_drift = 0.0;  // (vol(u+) - vol_ref) / vol_ref
  double min_det = 0.0;       // over elements, at u+
};

enum class Termination { reached_t_end, blow_up, invertibility_lost };

struct TerminationReason {
  Termination kind = Termination::reached_t_end;
  double t_star = 0.0;  // meaningful for blow_up / invertibility_lost
};

struct TimeSeriesRow {
  double t = 0.0;
  double pressure = 0.0;
  double volume = 0.0;
  double volume_drift = 0.0;
  double min_det = 0.0;
  double kinetic = 0.0;
  double strain = 0.0;
  int fp_iters = 0;
  double pressure_consistency = 0.0;
};
using TimeSeries = std::vector<TimeSeriesRow>;
using RowSink = std::function<void(const TimeSeriesRow&)>;
using StateSink = std::function<void(const State&)>;

// Holds the assembled operators and the factorization for the current dt.
// The referenced mesh and dof map must outlive the stepper.
class Stepper {
 public:
  Stepper(const Mesh& mesh, const DofMap& dofs, SimConfig cfg);

  // One implicit-Euler step of size dt() from `state`. Throws
  // FixedPointDiverged when the inner iteration fails (step rejection;
  // a smaller dt may succeed) and InvertibilityLost when the converged
  // configuration stops being locally invertible (terminal).
  std::pair<State, StepReport> step(const State& state) const;

  double dt() const { return dt_; }
  void set_dt(double dt);  // re-factors the operator

  // Volume the constraint steers every step towards; defaults to the
  // undeformed volume (u0 = 0).
  double reference_volume() const { return vol_ref_; }
  void set_reference_volume(double v) { vol_ref_ = v; }

  const SparseMatrix& mass() const { return mass_; }
  double m_norm(const NodalField& x) const;

 private:
  const Mesh& mesh_;
  const DofMap& dofs_;
  SimConfig cfg_;
  double dt_ = 0.0;
  double vol_ref_ = 0.0;
  SparseMatrix mass_;       // plain mass matrix (no Dirichlet elimination)
  SparseMatrix diffusion_;  // kappa-scaled velocity diffusion
  NodalField b_ref_;        // constraint row at u = 0, Dirichlet-zeroed
  std::optional<BorderedSolver> solver_;  // factorization of M/dt + kappa K
};

// One-off step without keeping a factorization around.
std::pair<State, StepReport> step(const State& state, const SimConfig& cfg,
                                  const Mesh& mesh, const DofMap& dofs);

// Advances from rest (u = 0, v = cfg.v0) to t_end, halving dt on rejected
// steps down to cfg.dt_min. Checks the t = 0 compatibility conditions
// (traction balance on the traction boundary, zero net normal flux of v0)
// and throws IncompatibleInitialData beyond 1e-8. Emits one row per
// accepted step (plus the initial row) to the sink as soon as the step is
// accepted; rows are final once emitted.
std::pair<TimeSeries, TerminationReason> run(const SimConfig& cfg,
                                             const Mesh& mesh,
                                             const RowSink& sink = {},
                                             const StateSink& state_sink = {});

// |p_formula - state.p| where p_formula recovers the pressure from the
// boundary traction balance: -(1/|Gamma_N|) int det(Phi)^-1 Phi^T
// (kappa dv/dn + sigma n - g) . n dGamma, with dv/dn taken from the
// adjacent element's gradient (first-order flux recovery).
double pressure_consistency(const State& state, const SimConfig& cfg,
                            const Mesh& mesh);

// (kinetic, strain) = (0.5 v^T M v, sum_e area_e W(E_e)).
std::pair<double, double> energies(const State& state, const SimConfig& cfg,
                                   const Mesh& mesh);

// Convergence study for the linear constrained problem (stress identically
// zero, reference normals) against the manufactured solution
//   v*(x, y, t) = (t sin(pi x), 0),  p*(t) = t
// on the unit square clamped left and right. Data: F = ((1 + kappa pi^2 t)
// sin(pi x), 0), G = p* n, H = 0. dt is tied to h^2, so the reported error
// decay against h isolates the spatial order.
struct MmsLevel {
  int n = 0;          // mesh is n x n
  double h = 0.0;     // 1 / n
  double dt = 0.0;
  double velocity_error = 0.0;  // M-norm at t_final
  double pressure_error = 0.0;  // |p_h - p*| at t_final
};
std::vector<MmsLevel> mms_convergence(const std::vector<int>& ns,
                                      double t_final, double kappa);

}  // namespace velast
