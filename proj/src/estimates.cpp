#include "velast/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "velast/errors.hpp"
#include "velast/kinematics.hpp"
#include "velast/materials.hpp"

namespace velast {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

// Trapezoidal quadrature weights for a (possibly non-uniform) grid.
std::vector<double> trapezoid_weights(const std::vector<double>& t) {
  const size_t n = t.size();
  std::vector<double> w(n, 0.0);
  w.front() = 0.5 * (t[1] - t[0]);
  w.back() = 0.5 * (t[n - 1] - t[n - 2]);
  for (size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (t[i + 1] - t[i - 1]);
  return w;
}

double trapezoid_lp_p(const std::vector<double>& t,
                      const std::vector<double>& v, double p) {
  const std::vector<double> w = trapezoid_weights(t);
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i)
    s += w[i] * std::pow(std::abs(v[i]), p);
  return s;
}

double min_spacing(const std::vector<double>& t) {
  double d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < t.size(); ++i) d = std::min(d, t[i + 1] - t[i]);
  return d;
}

SampledSignal prefix(const SampledSignal& s, size_t last) {
  SampledSignal out;
  out.times.assign(s.times.begin(), s.times.begin() + last + 1);
  out.values.assign(s.values.begin(), s.values.begin() + last + 1);
  return out;
}

}  // namespace

void validate_signal(const SampledSignal& s) {
  if (s.times.size() < 3)
    throw InvalidArgument("signal needs at least 3 samples");
  if (s.values.size() != s.times.size())
    throw InvalidArgument("signal needs one value per time");
  for (size_t i = 0; i + 1 < s.times.size(); ++i)
    if (!(s.times[i] < s.times[i + 1]))
      throw InvalidArgument("signal times must be strictly increasing");
}

SampledSignal make_uniform_signal(double T, std::vector<double> values) {
  if (!(T > 0.0)) throw InvalidArgument("signal horizon must be positive");
  SampledSignal s;
  s.values = std::move(values);
  const size_t n = s.values.size();
  if (n < 3) throw InvalidArgument("signal needs at least 3 samples");
  s.times.resize(n);
  for (size_t i = 0; i < n; ++i)
    s.times[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
  return s;
}

ScalingReport fit_scaling(std::vector<double> T_values,
                          std::vector<double> measured) {
  if (T_values.size() != measured.size() || T_values.size() < 4)
    throw InvalidArgument("scaling fit needs >= 4 (T, measured) pairs");
  ScalingReport r;
  r.T_values = std::move(T_values);
  r.measured = std::move(measured);

  std::vector<double> x, y;
  for (size_t i = 0; i < r.T_values.size(); ++i) {
    if (r.measured[i] > 0.0 && r.T_values[i] > 0.0) {
      x.push_back(std::log(r.T_values[i]));
      y.push_back(std::log(r.measured[i]));
    }
  }
  if (x.size() < 2) return r;  // degenerate: slope 0, r_squared 0

  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  r.slope = sxy / sxx;
  double ss_res = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - my - r.slope * (x[i] - mx);
    ss_res += e * e;
  }
  r.r_squared = syy > 1e-30 ? 1.0 - ss_res / syy : 1.0;
  return r;
}

double fractional_norm(const SampledSignal& s, double gamma, double p) {
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw InvalidExponent("fractional_norm: gamma must lie in (0, 1)");
  if (!(p >= 1.0)) throw InvalidExponent("fractional_norm: p must be >= 1");
  validate_signal(s);

  const std::vector<double>& t = s.times;
  const std::vector<double>& v = s.values;
  const std::vector<double> w = trapezoid_weights(t);
  const double band = min_spacing(t) * (1.0 - 1e-12);

  double total = trapezoid_lp_p(t, v, p);
  const double expo = 1.0 + gamma * p;
  for (size_t i = 0; i < t.size(); ++i) {
    for (size_t j = i + 1; j < t.size(); ++j) {
      const double d = t[j] - t[i];
      if (d < band) continue;
      total += 2.0 * w[i] * w[j] * std::pow(std::abs(v[i] - v[j]), p) /
               std::pow(d, expo);
    }
  }
  return std::pow(total, 1.0 / p);
}

SignalFamily linear_family(int n_samples) {
  return [n_samples](double T) {
    std::vector<double> v(static_cast<size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i)
      v[static_cast<size_t>(i)] =
          T * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    return make_uniform_signal(T, std::move(v));
  };
}

SignalFamily power_family(double exponent, int n_samples) {
  if (!(exponent > 0.0))
    throw InvalidArgument("power_family: exponent must be positive");
  return [exponent, n_samples](double T) {
    std::vector<double> v(static_cast<size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
      const double t =
          T * static_cast<double>(i) / static_cast<double>(n_samples - 1);
      v[static_cast<size_t>(i)] = std::pow(t, exponent);
    }
    return make_uniform_signal(T, std::move(v));
  };
}

SignalFamily brownian_family(unsigned seed, int n_samples) {
  // One frozen standard path W on the normalized grid xi_k = k / (n - 1).
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> path(static_cast<size_t>(n_samples), 0.0);
  const double root_dxi = std::sqrt(1.0 / static_cast<double>(n_samples - 1));
  for (int i = 1; i < n_samples; ++i)
    path[static_cast<size_t>(i)] =
        path[static_cast<size_t>(i - 1)] + root_dxi * normal(rng);
  return [path = std::move(path)](double T) {
    std::vector<double> v(path.size());
    const double root_t = std::sqrt(T);
    for (size_t i = 0; i < path.size(); ++i) v[i] = root_t * path[i];
    return make_uniform_signal(T, std::move(v));
  };
}

ScalingReport holder_embedding_check(const SignalFamily& family, double gamma,
                                     double p,
                                     const std::vector<double>& T_values) {
  if (!(p >= 1.0) || !(gamma > 0.0) || !(gamma < 1.0) || !(gamma * p > 1.0))
    throw InvalidExponent(
        "holder_embedding_check: needs p >= 1 and 1/p < gamma < 1");
  std::vector<double> measured;
  measured.reserve(T_values.size());
  for (const double T : T_values) {
    const SampledSignal s = family(T);
    validate_signal(s);
    double dev = 0.0;
    for (const double v : s.values)
      dev = std::max(dev, std::abs(v - s.values.front()));
    const double norm = fractional_norm(s, gamma, p);
    measured.push_back(norm > 0.0 ? dev / norm : 0.0);
  }
  return fit_scaling(T_values, std::move(measured));
}

BasicEstimatesReport basic_estimates_check(const DifferentiableSignal& s,
                                           double p, double alpha) {
  validate_signal(s.phi);
  if (s.dphi.size() != s.phi.times.size())
    throw InvalidArgument("derivative needs one value per time");
  if (s.phi.times.size() < 33)
    throw InvalidArgument(
        "basic_estimates_check needs >= 33 samples for the prefix scan");
  const double T = s.phi.times.back();
  if (!(T <= 1.0))
    throw InvalidArgument("basic_estimates_check assumes T <= 1");

  BasicEstimatesReport rep;
  const double phi0 = std::abs(s.phi.values.front());
  const double dphi_lp =
      std::pow(trapezoid_lp_p(s.phi.times, s.dphi, p), 1.0 / p);

  rep.sup_lhs = 0.0;
  for (const double v : s.phi.values)
    rep.sup_lhs = std::max(rep.sup_lhs, std::abs(v));
  rep.sup_rhs = phi0 + std::pow(T, 1.0 - 1.0 / p) * dphi_lp;
  rep.sup_bound_holds = rep.sup_lhs <= rep.sup_rhs * (1.0 + 1e-6);

  rep.lp_lhs = std::pow(trapezoid_lp_p(s.phi.times, s.phi.values, p), 1.0 / p);
  rep.lp_rhs = std::pow(T, 1.0 / p) * phi0 + T * dphi_lp;
  rep.lp_bound_holds = rep.lp_lhs <= rep.lp_rhs * (1.0 + 1e-6);

  // Interpolation bound over nested prefixes T_k = T / 2^k.
  std::vector<double> Ts, measured;
  const size_t last = s.phi.times.size() - 1;
  for (int k = 0; k < 5; ++k) {
    const size_t m = last >> k;
    const SampledSignal ps = prefix(s.phi, m);
    std::vector<double> pd(s.dphi.begin(), s.dphi.begin() + m + 1);
    const double frac = fractional_norm(ps, alpha, p);
    const double w1p = std::pow(trapezoid_lp_p(ps.times, ps.values, p) +
                                    trapezoid_lp_p(ps.times, pd, p),
                                1.0 / p);
    Ts.push_back(ps.times.back());
    const double denom = phi0 + w1p;
    measured.push_back(denom > 0.0 ? frac / denom : 0.0);
  }
  rep.interpolation = fit_scaling(std::move(Ts), std::move(measured));
  return rep;
}

NonlinearTermDiffs nonlinear_term_differences(const SimConfig& cfg,
                                              const Mesh& mesh, double T,
                                              const NodalField& v1,
                                              const NodalField& v2) {
  const NodalField u1 = T * v1;
  const NodalField u2 = T * v2;
  NonlinearTermDiffs d;

  const NodalField df = assemble_internal_force(mesh, cfg.material, u1) -
                        assemble_internal_force(mesh, cfg.material, u2);
  const SparseMatrix mass = assemble_mass(mesh);
  d.internal_force = std::sqrt(std::max(0.0, df.dot(mass * df)));

  const Mat2 eye = Mat2::Identity();
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    if (mesh.boundary_edges[e].tag != 'N') continue;
    const int tri = mesh.edge_triangle[e];
    const Eigen::Vector2d n = edge_normal(mesh, static_cast<int>(e));
    const Mat2 g1 = element_grad(mesh, tri, u1);
    const Mat2 g2 = element_grad(mesh, tri, u2);
    const Eigen::Vector2d dg =
        -(first_piola<2>(cfg.material, g1) - first_piola<2>(cfg.material, g2)) *
            n +
        (cofactor(Mat2(deformation_gradient(g2))) -
         cofactor(Mat2(deformation_gradient(g1)))) *
            n;
    d.boundary_traction = std::max(d.boundary_traction, dg.norm());
  }

  d.flux_functional = std::abs(constraint_rhs_H(mesh, u1, v1) -
                               constraint_rhs_H(mesh, u2, v2));
  return d;
}

std::pair<NodalField, NodalField> default_probe_fields(const Mesh& mesh,
                                                       const DofMap& dofs) {
  NodalField v1 = interpolate(mesh, [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(
        0.20 * std::sin(0.5 * kPi * x.x()) * std::cos(kPi * x.y()),
        0.20 * (1.0 - std::cos(kPi * x.x())) * std::sin(kPi * x.y()) / kPi);
  });
  NodalField v2 = interpolate(mesh, [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(
        0.15 * x.x() * (2.0 - x.x()) * (1.0 + 0.5 * x.y()),
        0.10 * std::sin(0.5 * kPi * x.x()) * std::cos(2.0 * kPi * x.y()));
  });
  zero_dirichlet(v1, dofs);
  zero_dirichlet(v2, dofs);
  return {std::move(v1), std::move(v2)};
}

LipschitzProbeReport lipschitz_scaling_probe(
    const SimConfig& cfg, const Mesh& mesh,
    const std::vector<double>& T_values, const NodalField& v1,
    const NodalField& v2) {
  std::vector<double> f, g, h;
  for (const double T : T_values) {
    const NonlinearTermDiffs d = nonlinear_term_differences(cfg, mesh, T, v1, v2);
    f.push_back(d.internal_force);
    g.push_back(d.boundary_traction);
    h.push_back(d.flux_functional);
  }
  LipschitzProbeReport rep;
  rep.internal_force = fit_scaling(T_values, std::move(f));
  rep.boundary_traction = fit_scaling(T_values, std::move(g));
  rep.flux_functional = fit_scaling(T_values, std::move(h));
  return rep;
}

LipschitzProbeReport lipschitz_scaling_probe(
    const SimConfig& cfg, const Mesh& mesh,
    const std::vector<double>& T_values) {
  const DofMap dofs = make_dof_map(mesh);
  const auto [v1, v2] = default_probe_fields(mesh, dofs);
  return lipschitz_scaling_probe(cfg, mesh, T_values, v1, v2);
}

CofactorReport cofactor_lipschitz_check(
    const std::vector<std::pair<NodalField, NodalField>>& u_pairs,
    const Mesh& mesh, int mc_samples_3d, unsigned seed) {
  CofactorReport rep;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& [ua, ub] : u_pairs) {
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
      const Mat2 a = deformation_gradient(
          Mat2(element_grad(mesh, static_cast<int>(t), ua)));
      const Mat2 b = deformation_gradient(
          Mat2(element_grad(mesh, static_cast<int>(t), ub)));
      const double diff = (a - b).norm();
      if (diff <= 0.0) continue;
      const double ratio = (cofactor(a) - cofactor(b)).norm() / diff;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  if (std::isfinite(lo)) {
    rep.min_ratio_2d = lo;
    rep.max_ratio_2d = hi;
  }

  // d = 3: bound carries the degree-(d-1) growth factor.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto sample_ball = [&]() {
    Mat<double, 3> m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = normal(rng);
    const double r = 2.0 * std::pow(unit(rng), 1.0 / 9.0);
    return Mat<double, 3>(m * (r / m.norm()));
  };
  for (int k = 0; k < mc_samples_3d; ++k) {
    const Mat<double, 3> a = sample_ball();
    const Mat<double, 3> b = sample_ball();
    const double diff = (a - b).norm();
    if (diff <= 1e-12) continue;
    const double ratio = (cofactor(a) - cofactor(b)).norm() /
                         (diff * (1.0 + a.norm() + b.norm()));
    rep.c_emp_3d = std::max(rep.c_emp_3d, ratio);
  }
  rep.samples_3d = mc_samples_3d;
  return rep;
}

void write_scaling_csv(const ScalingReport& r, std::ostream& out) {
  out << "T,measured,fit_slope,r2\n" << std::setprecision(17);
  for (size_t i = 0; i < r.T_values.size(); ++i)
    out << r.T_values[i] << ',' << r.measured[i] << ',' << r.slope << ','
        << r.r_squared << '\n';
}

bool all_pass(const std::vector<ProbeCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ProbeCheck& c) { return c.pass; });
}

void write_probe_summary(const std::vector<ProbeCheck>& checks,
                         std::ostream& out) {
  int failures = 0;
  out << std::setprecision(6);
  for (const ProbeCheck& c : checks) {
    out << (c.pass ? "PASS" : "FAIL") << "  " << c.name
        << " (value=" << c.value << ", threshold=" << c.threshold << ")\n";
    if (!c.pass) ++failures;
  }
  if (failures == 0)
    out << "ALL PASSED\n";
  else
    out << failures << " CHECK(S) FAILED\n";
}

}  // namespace velast
