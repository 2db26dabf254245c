#pragma once

// Desk-scale numerical verification of the quantitative bounds behind the
// solver's fixed-point argument: fractional Sobolev norms of time signals,
// the Hölder-in-time embedding rate, elementary T-power estimates, and the
// T-scaling of the nonlinear coupling terms of the elastodynamic system.
// Every evaluation is pure; checks over horizon lists and sample paths are
// embarrassingly parallel.

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "velast/assembly.hpp"
#include "velast/mesh.hpp"
#include "velast/stepper.hpp"

namespace velast {

// Scalar signal sampled on a uniform grid over [0, T].
struct SampledSignal {
  std::vector<double> times;
  std::vector<double> values;
};

// Throws InvalidArgument unless the signal has >= 3 samples on a strictly
// increasing grid with one value per time.
void validate_signal(const SampledSignal& s);

// Uniform grid on [0, T] carrying the given values (>= 3 of them).
SampledSignal make_uniform_signal(double T, std::vector<double> values);

// Signal together with its exact derivative on the same grid.
struct DifferentiableSignal {
  SampledSignal phi;
  std::vector<double> dphi;
};

// Power-law fit artifact: measured quantities per horizon T plus the
// log-log least-squares slope and its r^2.
struct ScalingReport {
  std::vector<double> T_values;
  std::vector<double> measured;
  double slope = 0.0;
  double r_squared = 0.0;
};

// Fits log(measured) against log(T) over the entries with measured > 0.
// Fewer than two positive entries yield slope 0 and r_squared 0. Throws
// InvalidArgument unless both lists have the same length >= 4.
ScalingReport fit_scaling(std::vector<double> T_values,
                          std::vector<double> measured);

// Discrete W^{gamma,p}(0,T) norm:
//   ( sum_i w_i |phi_i|^p
//     + sum_{i,j} w_i w_j |phi_i - phi_j|^p / |t_i - t_j|^{1 + gamma p} )^{1/p}
// with trapezoidal weights w and the diagonal band |t_i - t_j| < one grid
// spacing excluded from the double sum (on a uniform grid that is exactly
// i == j). Absolute values converge only under refinement; scaling laws in
// T are exact for self-similar signals on a fixed normalized grid.
// Throws InvalidExponent unless gamma in (0,1) and p >= 1.
double fractional_norm(const SampledSignal& s, double gamma, double p);

// A family produces the signal observed over the horizon T.
using SignalFamily = std::function<SampledSignal(double T)>;

// phi(t) = t.
SignalFamily linear_family(int n_samples = 257);
// phi(t) = t^exponent (exponent > 0).
SignalFamily power_family(double exponent, int n_samples = 257);
// One frozen Brownian path, diffusively rescaled to each horizon:
// phi_T(T xi) = sqrt(T) W(xi) on a fixed normalized grid, so each horizon
// sees the same path shape and the discrete scaling in T is exact.
SignalFamily brownian_family(unsigned seed, int n_samples = 257);

// Measures sup_t |phi(t) - phi(0)| / ||phi||_{W^{gamma,p}(0,T)} per horizon
// and fits the decay rate. Continuous embedding: the ratio is bounded by
// C T^{gamma - 1/p}, so the fitted slope must be >= gamma - 1/p up to the
// repo-wide exponent tolerance 0.05 (faster decay is allowed). Throws
// InvalidExponent unless 1/p < gamma < 1 and p >= 1.
ScalingReport holder_embedding_check(const SignalFamily& family, double gamma,
                                     double p,
                                     const std::vector<double>& T_values);

struct BasicEstimatesReport {
  // (a) ||phi||_inf <= |phi(0)| + T^{1/p'} ||dphi||_p
  double sup_lhs = 0.0;
  double sup_rhs = 0.0;
  bool sup_bound_holds = false;
  // (b) ||phi||_p <= T^{1/p} |phi(0)| + T ||dphi||_p
  double lp_lhs = 0.0;
  double lp_rhs = 0.0;
  bool lp_bound_holds = false;
  // (c) ||phi||_{W^{alpha,p}(0,T_k)} / (|phi(0)| + ||phi||_{W^{1,p}(0,T_k)})
  // over nested prefix horizons T_k = T / 2^k, fitted against T_k; bounded
  // by C T^{(1-alpha)/p}, so the slope must be >= (1-alpha)/p - 0.05.
  ScalingReport interpolation;
};

// Evaluates both sides of the elementary bounds (a) and (b) discretely
// ("holds" means LHS <= RHS * (1 + 1e-6)) and fits the prefix scaling (c).
// Requires T <= 1, alpha in (0,1), p >= 1 and >= 33 samples (for five
// nested prefixes); ||phi||_{W^{1,p}} uses the analytic derivative.
BasicEstimatesReport basic_estimates_check(const DifferentiableSignal& s,
                                           double p, double alpha);

// Per-horizon differences of the nonlinear coupling terms between two
// velocity fields, with the displacement surrogate u_i = T v_i:
//   internal_force     ||F(v1) - F(v2)||_M, F(v) = assembled div sigma(grad u)
//   boundary_traction  max over traction edges of |G(v1) - G(v2)|,
//                      G(v) = -sigma(grad u) n + (I - cof Phi(u)) n  (unit
//                      multiplier on the pressure part)
//   flux_functional    |H(v1) - H(v2)|, H(v) = int v . (I - cof Phi(u)) n
struct NonlinearTermDiffs {
  double internal_force = 0.0;
  double boundary_traction = 0.0;
  double flux_functional = 0.0;
};

NonlinearTermDiffs nonlinear_term_differences(const SimConfig& cfg,
                                              const Mesh& mesh, double T,
                                              const NodalField& v1,
                                              const NodalField& v2);

// The fixed smooth probe fields (distinct, zero on the clamped dofs).
std::pair<NodalField, NodalField> default_probe_fields(const Mesh& mesh,
                                                       const DofMap& dofs);

struct LipschitzProbeReport {
  ScalingReport internal_force;
  ScalingReport boundary_traction;
  ScalingReport flux_functional;
};

// Regresses the three term differences against T for the default probe
// fields. All three slopes sit at the theoretical exponent 1 (the material
// response is differentiable and I - cof Phi(T v) = O(T) in pointwise
// norms); the internal-force slope must land in [0.9, 1.1].
LipschitzProbeReport lipschitz_scaling_probe(const SimConfig& cfg,
                                             const Mesh& mesh,
                                             const std::vector<double>& T_values);
LipschitzProbeReport lipschitz_scaling_probe(const SimConfig& cfg,
                                             const Mesh& mesh,
                                             const std::vector<double>& T_values,
                                             const NodalField& v1,
                                             const NodalField& v2);

struct CofactorReport {
  // d = 2 over the element deformation gradients of the given pairs:
  // ||cof A - cof B||_F / ||A - B||_F. The cofactor permutes and negates
  // entries, so the ratio is identically 1.
  double min_ratio_2d = 0.0;
  double max_ratio_2d = 0.0;
  // d = 3 Monte Carlo over matrix pairs with ||A||_F, ||B||_F <= 2:
  // sup ||cof A - cof B||_F / (||A - B||_F (1 + ||A||_F + ||B||_F)).
  double c_emp_3d = 0.0;
  int samples_3d = 0;
};

// Pairs with coincident gradients contribute nothing (0/0 is skipped).
CofactorReport cofactor_lipschitz_check(
    const std::vector<std::pair<NodalField, NodalField>>& u_pairs,
    const Mesh& mesh, int mc_samples_3d = 4096, unsigned seed = 1234);

// One CSV row per horizon: T,measured,fit_slope,r2 (slope and r2 repeated).
void write_scaling_csv(const ScalingReport& r, std::ostream& out);

// One named threshold check of a probe run.
struct ProbeCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

bool all_pass(const std::vector<ProbeCheck>& checks);

// Plain-text summary: one "PASS name (value vs threshold)" line per check
// plus a final "ALL PASSED" / "N CHECK(S) FAILED" verdict.
void write_probe_summary(const std::vector<ProbeCheck>& checks,
                         std::ostream& out);

}  // namespace velast
