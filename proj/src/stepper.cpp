#include "velast/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "velast/errors.hpp"

namespace velast {

void SimConfig::validate() const {
  if (!(kappa > 0.0)) throw ConfigError("sim.kappa must be > 0");
  if (!(dt > 0.0)) throw ConfigError("sim.dt must be > 0");
  if (!(t_end >= 0.0)) throw ConfigError("sim.t_end must be >= 0");
  if (!(fp_tol > 0.0)) throw ConfigError("sim.fp_tol must be > 0");
  if (fp_max_iters < 1) throw ConfigError("sim.fp_max_iters must be >= 1");
  if (!(dt_min > 0.0) || !(dt_min <= dt))
    throw ConfigError("sim.dt_min must satisfy 0 < dt_min <= dt");
  if (rho != 1.0) throw ConfigError("sim.rho is fixed at 1");
  try {
    velast::validate(material);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

Stepper::Stepper(const Mesh& mesh, const DofMap& dofs, SimConfig cfg)
    : mesh_(mesh), dofs_(dofs), cfg_(std::move(cfg)) {
  cfg_.validate();
  mass_ = assemble_mass(mesh_);
  diffusion_ = assemble_diffusion(mesh_, cfg_.kappa);
  b_ref_ = assemble_constraint_row(mesh_, NodalField::Zero(dofs_.n_dofs()));
  zero_dirichlet(b_ref_, dofs_);
  vol_ref_ = total_area(mesh_);
  set_dt(cfg_.dt);
}

void Stepper::set_dt(double dt) {
  if (!(dt > 0.0)) throw ConfigError("sim.dt must be > 0");
  dt_ = dt;
  SparseMatrix a = mass_ * (1.0 / dt_) + diffusion_;
  apply_dirichlet(a, dofs_);
  solver_.emplace(a);
}

double Stepper::m_norm(const NodalField& x) const {
  return std::sqrt(x.dot(mass_ * x));
}

std::pair<State, StepReport> Stepper::step(const State& state) const {
  const double t_plus = state.t + dt_;
  if (min_det(mesh_, state.u) <= 0.0)
    throw InvertibilityLost("step started from a non-invertible configuration",
                            state.t);

  NodalField load = mass_ * state.v / dt_;
  if (cfg_.f) load += assemble_volume_load(mesh_, cfg_.f, t_plus);
  if (cfg_.g) load += assemble_neumann_load(mesh_, cfg_.g, t_plus);

  const double vol_n = enclosed_volume(mesh_, state.u);
  const double h_stab = (vol_ref_ - vol_n) / dt_;

  NodalField v_a = state.v;
  double p_a = state.p;
  std::vector<double> increments;
  increments.reserve(static_cast<size_t>(cfg_.fp_max_iters));
  int growth_streak = 0;
  bool converged = false;

  for (int a = 0; a < cfg_.fp_max_iters && !converged; ++a) {
    const NodalField u_end = state.u + dt_ * v_a;
    if (!u_end.allFinite())
      throw FixedPointDiverged("fixed-point iterates overflowed", a);
    if (min_det(mesh_, u_end) <= 0.0)
      throw FixedPointDiverged("fixed-point iterate left the invertible range",
                               a);
    const NodalField u_mid = state.u + (0.5 * dt_) * v_a;

    NodalField rhs = load;
    double h = h_stab;
    NodalField row;
    try {
      rhs += assemble_internal_force(mesh_, cfg_.material, u_end);
      if (cfg_.constraint_mode == ConstraintMode::split_rhs) {
        rhs += nonlinear_boundary_rhs(mesh_, cfg_.material, u_mid, p_a);
        h += constraint_rhs_H(mesh_, u_mid, v_a);
        row = b_ref_;
      } else {
        row = assemble_constraint_row(mesh_, u_mid);
        zero_dirichlet(row, dofs_);
      }
    } catch (const NonPositiveEigenvalue&) {
      throw FixedPointDiverged(
          "fixed-point iterate left the material's admissible range", a);
    }

    // Optional Newton acceleration: move the internal-force linearization
    // about the current iterate into the operator (re-factored per
    // iteration); the fixed point is unchanged.
    std::optional<BorderedSolver> newton_solver;
    const BorderedSolver* solver = &*solver_;
    if (cfg_.newton_accel) {
      const SparseMatrix j =
          assemble_internal_force_jacobian(mesh_, cfg_.material, u_end);
      SparseMatrix a_newton = mass_ * (1.0 / dt_) + diffusion_ - dt_ * j;
      apply_dirichlet(a_newton, dofs_);
      rhs -= dt_ * (j * v_a);
      newton_solver.emplace(a_newton);
      solver = &*newton_solver;
    }

    zero_dirichlet(rhs, dofs_);
    if (!rhs.allFinite() || !std::isfinite(h))
      throw FixedPointDiverged("fixed-point iterates overflowed", a);

    const SaddleSolution sol = solver->solve(row, rhs, h);
    const double inc = m_norm(sol.v - v_a) + std::abs(sol.p - p_a);
    v_a = sol.v;
    p_a = sol.p;

    if (!std::isfinite(inc))
      throw FixedPointDiverged("fixed-point iterates overflowed", a + 1);
    growth_streak =
        (!increments.empty() && inc > increments.back()) ? growth_streak + 1
                                                         : 0;
    increments.push_back(inc);
    if (inc <= cfg_.fp_tol)
      converged = true;
    else if (growth_streak >= 3)
      throw FixedPointDiverged(
          "fixed-point increments grew for 3 consecutive iterations",
          static_cast<int>(increments.size()));
  }
  if (!converged)
    throw FixedPointDiverged("fixed-point iteration hit the iteration cap",
                             static_cast<int>(increments.size()));

  State next;
  next.t = t_plus;
  next.u = state.u + dt_ * v_a;
  next.v = std::move(v_a);
  next.p = p_a;

  StepReport report;
  report.fp_iterations = static_cast<int>(increments.size());
  report.final_increment = increments.back();
  report.contraction_ratios.reserve(increments.size() - 1);
  for (size_t k = 0; k + 1 < increments.size(); ++k)
    report.contraction_ratios.push_back(increments[k + 1] / increments[k]);
  report.min_det = min_det(mesh_, next.u);
  if (report.min_det <= 0.0)
    throw InvertibilityLost("converged configuration lost local invertibility",
                            t_plus);
  report.volume_drift =
      (enclosed_volume(mesh_, next.u) - vol_ref_) / vol_ref_;
  return {std::move(next), std::move(report)};
}

std::pair<State, StepReport> step(const State& state, const SimConfig& cfg,
                                  const Mesh& mesh, const DofMap& dofs) {
  Stepper stepper(mesh, dofs, cfg);
  // A one-off step conserves the volume it starts from.
  stepper.set_reference_volume(enclosed_volume(mesh, state.u));
  return stepper.step(state);
}

namespace {

void check_initial_compatibility(const SimConfig& cfg, const Mesh& mesh,
                                 const DofMap& dofs, const NodalField& v0) {
  constexpr double kTol = 1e-8;
  for (int d : dofs.dirichlet_dofs)
    if (std::abs(v0(d)) > kTol)
      throw IncompatibleInitialData(
          "initial velocity violates the clamped boundary");

  const Mat2 sigma0 = first_piola<2>(cfg.material, Mat2::Zero());
  double worst = 0.0;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    if (mesh.boundary_edges[e].tag != 'N') continue;
    const int idx = static_cast<int>(e);
    const Eigen::Vector2d n = edge_normal(mesh, idx);
    const Mat2 grad_v0 = element_grad(mesh, mesh.edge_triangle[e], v0);
    const Eigen::Vector2d g0 =
        cfg.g ? cfg.g(edge_midpoint(mesh, idx), 0.0, n)
              : Eigen::Vector2d::Zero();
    const Eigen::Vector2d res = cfg.kappa * (grad_v0 * n) + sigma0 * n - g0;
    worst = std::max(worst, res.lpNorm<Eigen::Infinity>());
  }
  if (worst > kTol)
    throw IncompatibleInitialData(
        "traction data at t = 0 does not balance the initial stress "
        "(residual " +
        std::to_string(worst) + ")");

  const NodalField b0 =
      assemble_constraint_row(mesh, NodalField::Zero(dofs.n_dofs()));
  const double flux = std::abs(b0.dot(v0));
  if (flux > kTol)
    throw IncompatibleInitialData(
        "initial velocity carries net normal flux through the traction "
        "boundary (" +
        std::to_string(flux) + ")");
}

}  // namespace

std::pair<TimeSeries, TerminationReason> run(const SimConfig& cfg,
                                             const Mesh& mesh,
                                             const RowSink& sink,
                                             const StateSink& state_sink) {
  cfg.validate();
  const DofMap dofs = make_dof_map(mesh);

  State s;
  s.u = NodalField::Zero(dofs.n_dofs());
  s.v = cfg.v0 ? interpolate(mesh, cfg.v0)
               : NodalField::Zero(dofs.n_dofs());

  check_initial_compatibility(cfg, mesh, dofs, s.v);

  Stepper stepper(mesh, dofs, cfg);
  TimeSeries series;
  const auto emit = [&](const State& st, int fp_iters) {
    TimeSeriesRow row;
    row.t = st.t;
    row.pressure = st.p;
    row.volume = enclosed_volume(mesh, st.u);
    row.volume_drift = (row.volume - stepper.reference_volume()) /
                       stepper.reference_volume();
    row.min_det = min_det(mesh, st.u);
    row.kinetic = 0.5 * st.v.dot(stepper.mass() * st.v);
    row.strain = total_strain_energy(mesh, cfg.material, st.u);
    row.fp_iters = fp_iters;
    row.pressure_consistency = pressure_consistency(st, cfg, mesh);
    series.push_back(row);
    if (sink) sink(row);
    if (state_sink) state_sink(st);
  };
  emit(s, 0);

  const double t_tol = 1e-12 * std::max(1.0, cfg.t_end);
  while (s.t < cfg.t_end - t_tol) {
    if (s.t + stepper.dt() > cfg.t_end + t_tol)
      stepper.set_dt(cfg.t_end - s.t);  // land exactly on t_end
    try {
      auto [next, report] = stepper.step(s);
      s = std::move(next);
      emit(s, report.fp_iterations);
    } catch (const FixedPointDiverged&) {
      const double half = stepper.dt() / 2.0;
      if (half < cfg.dt_min)
        return {std::move(series), {Termination::blow_up, s.t}};
      stepper.set_dt(half);  // kept smaller for the rest of the run
    } catch (const InvertibilityLost& e) {
      return {std::move(series),
              {Termination::invertibility_lost, e.time}};
    }
  }
  return {std::move(series), {Termination::reached_t_end, cfg.t_end}};
}

double pressure_consistency(const State& state, const SimConfig& cfg,
                            const Mesh& mesh) {
  double flux = 0.0;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    if (mesh.boundary_edges[e].tag != 'N') continue;
    const int idx = static_cast<int>(e);
    const int tri = mesh.edge_triangle[e];
    const Mat2 grad_u = element_grad(mesh, tri, state.u);
    const Mat2 phi = deformation_gradient(grad_u);
    const double det = phi.determinant();
    if (det <= 0.0)
      throw InvertibilityLost(
          "pressure recovery in a non-invertible configuration", state.t);
    const Eigen::Vector2d n = edge_normal(mesh, idx);
    const Mat2 grad_v = element_grad(mesh, tri, state.v);
    const Eigen::Vector2d g_mid =
        cfg.g ? cfg.g(edge_midpoint(mesh, idx), state.t, n)
              : Eigen::Vector2d::Zero();
    const Eigen::Vector2d traction = cfg.kappa * (grad_v * n) +
                                     first_piola<2>(cfg.material, grad_u) * n -
                                     g_mid;
    flux += edge_length(mesh, idx) * (phi.transpose() * traction).dot(n) / det;
  }
  const double p_formula = -flux / neumann_measure(mesh);
  return std::abs(p_formula - state.p);
}

std::pair<double, double> energies(const State& state, const SimConfig& cfg,
                                   const Mesh& mesh) {
  const SparseMatrix m = assemble_mass(mesh);
  return {0.5 * state.v.dot(m * state.v),
          total_strain_energy(mesh, cfg.material, state.u)};
}

std::vector<MmsLevel> mms_convergence(const std::vector<int>& ns,
                                      double t_final, double kappa) {
  constexpr double pi = std::numbers::pi_v<double>;
  std::vector<MmsLevel> out;
  out.reserve(ns.size());
  for (const int n : ns) {
    const Mesh mesh = structured_square_mesh(n, n, {Side::left, Side::right});
    const DofMap dofs = make_dof_map(mesh);
    const double h = 1.0 / n;
    const int steps =
        std::max(1, static_cast<int>(std::ceil(t_final / (h * h))));
    const double dt = t_final / steps;

    const SparseMatrix m = assemble_mass(mesh);
    SparseMatrix a = m * (1.0 / dt) + assemble_diffusion(mesh, kappa);
    apply_dirichlet(a, dofs);
    const BorderedSolver solver(a);
    NodalField b0 =
        assemble_constraint_row(mesh, NodalField::Zero(dofs.n_dofs()));
    zero_dirichlet(b0, dofs);

    const VolumeFunction body = [kappa](const Eigen::Vector2d& x, double t) {
      return Eigen::Vector2d(
          (1.0 + kappa * pi * pi * t) * std::sin(pi * x.x()), 0.0);
    };
    const BoundaryFunction traction = [](const Eigen::Vector2d&, double t,
                                         const Eigen::Vector2d& nrm) {
      return Eigen::Vector2d(t * nrm);
    };

    NodalField v_h = NodalField::Zero(dofs.n_dofs());
    double p_h = 0.0;
    double t = 0.0;
    for (int k = 0; k < steps; ++k) {
      t = dt * (k + 1);
      NodalField rhs = m * v_h / dt + assemble_volume_load(mesh, body, t) +
                       assemble_neumann_load(mesh, traction, t);
      zero_dirichlet(rhs, dofs);
      const SaddleSolution sol = solver.solve(b0, rhs, 0.0);
      v_h = sol.v;
      p_h = sol.p;
    }

    const NodalField v_exact =
        interpolate(mesh, [t](const Eigen::Vector2d& x) {
          return Eigen::Vector2d(t * std::sin(pi * x.x()), 0.0);
        });
    const NodalField diff = v_h - v_exact;
    MmsLevel lvl;
    lvl.n = n;
    lvl.h = h;
    lvl.dt = dt;
    lvl.velocity_error = std::sqrt(diff.dot(m * diff));
    lvl.pressure_error = std::abs(p_h - t);
    out.push_back(lvl);
  }
  return out;
}

}  // namespace velast
