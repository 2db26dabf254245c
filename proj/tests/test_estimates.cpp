#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "velast/errors.hpp"
#include "velast/estimates.hpp"

using namespace velast;

namespace {

const std::vector<double> kHorizons = {1.0, 0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3};

SignalFamily constant_family(double c, int n = 65) {
  return [c, n](double T) {
    return make_uniform_signal(T, std::vector<double>(n, c));
  };
}

DifferentiableSignal sampled_polynomial(const std::vector<double>& coeffs,
                                        double T, int n) {
  std::vector<double> v(n), dv(n);
  for (int i = 0; i < n; ++i) {
    const double t = T * i / static_cast<double>(n - 1);
    double val = 0.0, der = 0.0, tp = 1.0;
    for (size_t k = 0; k < coeffs.size(); ++k) {
      val += coeffs[k] * tp;
      if (k + 1 < coeffs.size())
        der += coeffs[k + 1] * static_cast<double>(k + 1) * tp;
      tp *= t;
    }
    v[i] = val;
    dv[i] = der;
  }
  return {make_uniform_signal(T, std::move(v)), std::move(dv)};
}

}  // namespace

TEST_CASE("signal validation") {
  CHECK_THROWS_AS(make_uniform_signal(1.0, {1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(make_uniform_signal(0.0, {1.0, 2.0, 3.0}), InvalidArgument);
  SampledSignal s = make_uniform_signal(2.0, {0.0, 1.0, 4.0});
  CHECK(s.times == std::vector<double>{0.0, 1.0, 2.0});
  s.times[2] = 1.0;  // no longer increasing
  CHECK_THROWS_AS(validate_signal(s), InvalidArgument);
  s.times[2] = 2.0;
  s.values.pop_back();
  CHECK_THROWS_AS(validate_signal(s), InvalidArgument);
}

TEST_CASE("fractional norm rejects out-of-range exponents") {
  const SampledSignal s = make_uniform_signal(1.0, {0.0, 1.0, 2.0});
  CHECK_THROWS_AS(fractional_norm(s, 0.0, 2.0), InvalidExponent);
  CHECK_THROWS_AS(fractional_norm(s, 1.0, 2.0), InvalidExponent);
  CHECK_THROWS_AS(fractional_norm(s, 1.2, 2.0), InvalidExponent);
  CHECK_THROWS_AS(fractional_norm(s, 0.5, 0.5), InvalidExponent);
  CHECK_NOTHROW(fractional_norm(s, 0.5, 1.0));
}

TEST_CASE("fractional norm of flat signals") {
  // Constant: seminorm vanishes, trapezoid weights sum exactly to T, so the
  // norm is T^{1/p} |c|.
  for (const double T : {0.25, 1.0}) {
    for (const double p : {1.0, 2.0, 4.0}) {
      const auto c = constant_family(-1.7, 33)(T);
      CHECK(fractional_norm(c, 0.3, p) ==
            doctest::Approx(std::pow(T, 1.0 / p) * 1.7).epsilon(1e-13));
    }
  }
  const auto z = constant_family(0.0, 33)(0.7);
  CHECK(fractional_norm(z, 0.6, 3.0) == 0.0);
}

TEST_CASE("fractional norm converges under grid refinement") {
  // phi(t) = t on [0,1], gamma 0.4, p 4: gamma p < 1 keeps the diagonal
  // integrable, so the excluded band vanishes in the limit.
  std::vector<double> norms;
  for (const int n : {65, 129, 257, 513})
    norms.push_back(fractional_norm(linear_family(n)(1.0), 0.4, 4.0));
  CHECK(norms[2] == doctest::Approx(0.8168012134).epsilon(1e-8));
  for (size_t i = 0; i + 1 < norms.size(); ++i) {
    const double diff = std::abs(norms[i + 1] - norms[i]);
    CHECK(diff <= 0.01 * norms[i + 1]);  // Cauchy within 1%
    if (i + 2 < norms.size())
      CHECK(std::abs(norms[i + 2] - norms[i + 1]) < diff);  // and shrinking
  }
}

TEST_CASE("fractional norm grows when the horizon is extended") {
  // Restricting to a prefix drops double-sum terms and shrinks the cut
  // sample's quadrature weight, so the norm can only go up with T.
  auto check_nested = [](const SampledSignal& full) {
    const size_t half = (full.times.size() - 1) / 2;
    SampledSignal pre;
    pre.times.assign(full.times.begin(), full.times.begin() + half + 1);
    pre.values.assign(full.values.begin(), full.values.begin() + half + 1);
    CHECK(fractional_norm(pre, 0.7, 2.0) <=
          fractional_norm(full, 0.7, 2.0) + 1e-15);
  };
  check_nested(linear_family(129)(1.0));
  check_nested(power_family(0.6, 129)(1.0));
  check_nested(brownian_family(42, 129)(1.0));
}

TEST_CASE("log-log fitting") {
  SUBCASE("exact power law is recovered") {
    std::vector<double> T = {1.0, 0.5, 0.1, 0.05, 0.01};
    std::vector<double> m;
    for (const double t : T) m.push_back(3.0 * std::pow(t, 1.5));
    const ScalingReport r = fit_scaling(T, m);
    CHECK(r.slope == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(r.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.T_values.size() == 5);
    CHECK(r.measured.size() == 5);
  }
  SUBCASE("degenerate data yields a null fit") {
    const ScalingReport r =
        fit_scaling({1.0, 0.1, 0.01, 1e-3}, {0.0, 0.0, 0.0, 0.0});
    CHECK(r.slope == 0.0);
    CHECK(r.r_squared == 0.0);
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(fit_scaling({1.0, 0.1, 0.01}, {1.0, 2.0, 3.0}),
                    InvalidArgument);
    CHECK_THROWS_AS(fit_scaling({1.0, 0.1, 0.01, 1e-3}, {1.0, 2.0, 3.0}),
                    InvalidArgument);
  }
}

TEST_CASE("sup-deviation over fractional norm decays at the embedding rate") {
  SUBCASE("linear signal, gamma 0.9, p 4") {
    const ScalingReport r = holder_embedding_check(
        linear_family(), 0.9, 4.0, {1.0, 0.1, 0.01, 1e-3});
    CHECK(r.slope >= 0.9 - 0.25 - 0.05);  // >= gamma - 1/p - tolerance
    CHECK(r.slope == doctest::Approx(0.6480).epsilon(0.02));
    CHECK(r.r_squared >= 0.999);
  }
  SUBCASE("smooth and rough families at three exponent pairs") {
    const double pairs[3][2] = {{0.8, 4.0}, {0.75, 2.0}, {0.6, 3.0}};
    for (const auto& gp : pairs) {
      const double target = gp[0] - 1.0 / gp[1] - 0.05;
      CHECK(holder_embedding_check(linear_family(), gp[0], gp[1], kHorizons)
                .slope >= target);
      CHECK(holder_embedding_check(power_family(0.6), gp[0], gp[1], kHorizons)
                .slope >= target);
      double worst = 1e300;
      for (unsigned seed = 1; seed <= 20; ++seed)
        worst = std::min(
            worst, holder_embedding_check(brownian_family(seed), gp[0], gp[1],
                                          kHorizons)
                       .slope);
      CHECK(worst >= target);
    }
  }
  SUBCASE("diffusively rescaled rough paths are near-tight") {
    // The rescaling keeps the normalized path fixed, so once the seminorm
    // dominates, the ratio scales exactly like T^{gamma - 1/p}.
    double worst = 1e300;
    for (unsigned seed = 1; seed <= 20; ++seed)
      worst = std::min(worst, holder_embedding_check(brownian_family(seed),
                                                     0.8, 4.0, kHorizons)
                                  .slope);
    CHECK(worst >= 0.50);
    CHECK(worst <= 0.58);  // cannot beat the exact rate by much
  }
  SUBCASE("constant family degenerates to zero ratios") {
    const ScalingReport r = holder_embedding_check(
        constant_family(2.0), 0.8, 4.0, {1.0, 0.1, 0.01, 1e-3});
    for (const double m : r.measured) CHECK(m == 0.0);
    CHECK(r.slope == 0.0);
  }
  SUBCASE("exponent gate") {
    CHECK_THROWS_AS(
        holder_embedding_check(linear_family(), 0.2, 4.0, kHorizons),
        InvalidExponent);  // gamma <= 1/p
    CHECK_THROWS_AS(
        holder_embedding_check(linear_family(), 0.5, 2.0, kHorizons),
        InvalidExponent);  // boundary case gamma p == 1
  }
}

TEST_CASE("elementary horizon-power bounds") {
  SUBCASE("constant signal makes the sup bound an equality") {
    DifferentiableSignal s{make_uniform_signal(0.5, std::vector<double>(65, 0.9)),
                           std::vector<double>(65, 0.0)};
    const BasicEstimatesReport r = basic_estimates_check(s, 4.0, 0.5);
    CHECK(r.sup_lhs == 0.9);
    CHECK(r.sup_rhs == 0.9);
    CHECK(r.sup_bound_holds);
    CHECK(r.lp_bound_holds);
  }
  SUBCASE("phi(t) = t has closed-form L4 norms") {
    const int n = 257;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = 0.5 * i / double(n - 1);
    DifferentiableSignal s{make_uniform_signal(0.5, v),
                           std::vector<double>(n, 1.0)};
    const BasicEstimatesReport r = basic_estimates_check(s, 4.0, 0.5);
    // ||t||_{L^4(0,T)} = T^{5/4} / 5^{1/4}, and the right side is T^{5/4}.
    CHECK(r.lp_lhs ==
          doctest::Approx(std::pow(0.5, 1.25) / std::pow(5.0, 0.25))
              .epsilon(1e-5));
    CHECK(r.lp_rhs == doctest::Approx(std::pow(0.5, 1.25)).epsilon(1e-13));
    CHECK(r.lp_bound_holds);
    // Sup bound is an equality here: T = T^{1/p'} * T^{1/p}.
    CHECK(r.sup_lhs == doctest::Approx(r.sup_rhs).epsilon(1e-12));
    CHECK(r.sup_bound_holds);
  }
  SUBCASE("no violations over random polynomials") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_real_distribution<double> horizon(0.1, 1.0);
    for (int draw = 0; draw < 100; ++draw) {
      std::vector<double> c(5);
      for (double& x : c) x = coeff(rng);
      const DifferentiableSignal s =
          sampled_polynomial(c, horizon(rng), 257);
      const BasicEstimatesReport r = basic_estimates_check(s, 3.0, 0.4);
      CHECK(r.sup_bound_holds);
      CHECK(r.lp_bound_holds);
    }
  }
  SUBCASE("prefix ratios scale at least at the interpolation rate") {
    const int n = 257;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = 0.5 * i / double(n - 1);
    DifferentiableSignal lin{make_uniform_signal(0.5, v),
                             std::vector<double>(n, 1.0)};
    const BasicEstimatesReport r1 = basic_estimates_check(lin, 4.0, 0.5);
    CHECK(r1.interpolation.slope >= (1.0 - 0.5) / 4.0 - 0.05);
    CHECK(r1.interpolation.slope == doctest::Approx(0.5102).epsilon(0.05));
    CHECK(r1.interpolation.r_squared >= 0.99);
    CHECK(r1.interpolation.T_values.size() == 5);

    const DifferentiableSignal poly =
        sampled_polynomial({0.7, -0.4, 0.9}, 0.8, 257);
    const BasicEstimatesReport r2 = basic_estimates_check(poly, 2.0, 0.3);
    CHECK(r2.interpolation.slope >= (1.0 - 0.3) / 2.0 - 0.05);
  }
  SUBCASE("input gates") {
    DifferentiableSignal tiny{make_uniform_signal(0.5, std::vector<double>(9, 1.0)),
                              std::vector<double>(9, 0.0)};
    CHECK_THROWS_AS(basic_estimates_check(tiny, 2.0, 0.5), InvalidArgument);
    DifferentiableSignal late{make_uniform_signal(2.0, std::vector<double>(65, 1.0)),
                              std::vector<double>(65, 0.0)};
    CHECK_THROWS_AS(basic_estimates_check(late, 2.0, 0.5), InvalidArgument);
  }
}

TEST_CASE("nonlinear term differences scale linearly in the horizon") {
  const Mesh mesh = structured_square_mesh(12, 12, {Side::left});
  const DofMap dofs = make_dof_map(mesh);
  const std::vector<double> Ts = {1e-1, 1e-2, 1e-3, 1e-4};

  SUBCASE("identical fields produce exact zeros") {
    SimConfig cfg;
    const auto [v1, v2] = default_probe_fields(mesh, dofs);
    for (const double T : {1.0, 1e-2, 1e-4}) {
      const NonlinearTermDiffs d =
          nonlinear_term_differences(cfg, mesh, T, v1, v1);
      CHECK(d.internal_force == 0.0);
      CHECK(d.boundary_traction == 0.0);
      CHECK(d.flux_functional == 0.0);
    }
  }
  SUBCASE("slopes for all material families") {
    for (int m = 0; m < 3; ++m) {
      SimConfig cfg;
      if (m == 1) cfg.material = Fung{0.1, 0.8, 1.2};
      if (m == 2) cfg.material = Ogden{{{0.5, 3.0}, {0.3, -2.0}}};
      const LipschitzProbeReport rep = lipschitz_scaling_probe(cfg, mesh, Ts);
      CHECK(rep.internal_force.slope >= 0.9);
      CHECK(rep.internal_force.slope <= 1.1);
      CHECK(rep.internal_force.r_squared >= 0.999);
      CHECK(rep.boundary_traction.slope >= 0.9);
      CHECK(rep.flux_functional.slope >= 0.9);
      // In two dimensions I - cof(I + T grad v) is exactly linear in T, so
      // the flux functional difference fits a pure power law.
      CHECK(rep.flux_functional.slope == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("doubling the field difference doubles the force difference") {
    SimConfig cfg;
    const auto [v1, v2] = default_probe_fields(mesh, dofs);
    const NodalField v2d = v1 + 2.0 * (v2 - v1);
    const NonlinearTermDiffs base =
        nonlinear_term_differences(cfg, mesh, 1e-3, v1, v2);
    const NonlinearTermDiffs twice =
        nonlinear_term_differences(cfg, mesh, 1e-3, v1, v2d);
    CHECK(twice.internal_force / base.internal_force ==
          doctest::Approx(2.0).epsilon(0.05));
    CHECK(twice.boundary_traction / base.boundary_traction ==
          doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("cofactor difference bounds") {
  const Mesh mesh = structured_square_mesh(12, 12, {Side::left});
  const DofMap dofs = make_dof_map(mesh);
  const auto [v1, v2] = default_probe_fields(mesh, dofs);

  SUBCASE("coincident fields contribute nothing") {
    const CofactorReport r =
        cofactor_lipschitz_check({{v1, v1}}, mesh, 0, 1);
    CHECK(r.min_ratio_2d == 0.0);
    CHECK(r.max_ratio_2d == 0.0);
  }
  SUBCASE("planar cofactor is an isometry of the difference") {
    // cof of a 2x2 matrix permutes and negates entries, so the Frobenius
    // ratio is identically one for every pair.
    const std::vector<std::pair<NodalField, NodalField>> pairs = {
        {0.3 * v1, 0.2 * v2}, {v1, NodalField(-0.5 * v1)}};
    const CofactorReport r = cofactor_lipschitz_check(pairs, mesh, 0, 1);
    CHECK(r.min_ratio_2d == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.max_ratio_2d == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("spatial cofactor constant is stable across samplings") {
    const CofactorReport a = cofactor_lipschitz_check({}, mesh, 4096, 1234);
    const CofactorReport b = cofactor_lipschitz_check({}, mesh, 4096, 99);
    CHECK(a.samples_3d == 4096);
    CHECK(a.c_emp_3d == doctest::Approx(0.3316).epsilon(1e-3));
    CHECK(b.c_emp_3d / a.c_emp_3d == doctest::Approx(1.0).epsilon(0.1));
    const CofactorReport big = cofactor_lipschitz_check({}, mesh, 8192, 1234);
    CHECK(big.c_emp_3d / a.c_emp_3d == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("report writers") {
  SUBCASE("scaling CSV") {
    ScalingReport r;
    r.T_values = {1.0, 0.1, 0.01, 1e-3};
    r.measured = {2.0, 0.9, 0.4, 0.18};
    r.slope = 0.35;
    r.r_squared = 0.998;
    std::ostringstream out;
    write_scaling_csv(r, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "T,measured,fit_slope,r2");
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 3);
    }
    CHECK(rows == 4);
    CHECK(out.str().find("1,2,") == out.str().find('\n') + 1);
  }
  SUBCASE("plain-text verdicts") {
    std::ostringstream ok;
    write_probe_summary({{"alpha", true, 1.0, 0.9}, {"beta", true, 2.0, 1.5}},
                        ok);
    CHECK(ok.str().find("PASS  alpha") != std::string::npos);
    CHECK(ok.str().find("ALL PASSED") != std::string::npos);
    CHECK(all_pass({{"alpha", true, 1.0, 0.9}}));

    std::ostringstream bad;
    write_probe_summary({{"alpha", true, 1.0, 0.9}, {"beta", false, 0.1, 1.5}},
                        bad);
    CHECK(bad.str().find("FAIL  beta") != std::string::npos);
    CHECK(bad.str().find("1 CHECK(S) FAILED") != std::string::npos);
    CHECK_FALSE(all_pass({{"beta", false, 0.1, 1.5}}));
  }
}
