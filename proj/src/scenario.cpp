#include "velast/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "velast/errors.hpp"
#include "velast/estimates.hpp"
#include "velast/kinematics.hpp"
#include "velast/materials.hpp"
#include "velast/vtk.hpp"

namespace fs = std::filesystem;

namespace velast {

namespace {

void write_row(std::ostream& csv, const TimeSeriesRow& r) {
  csv << r.t << ',' << r.pressure << ',' << r.volume << ',' << r.volume_drift
      << ',' << r.min_det << ',' << r.kinetic << ',' << r.strain << ','
      << r.fp_iters << ',' << r.pressure_consistency << '\n';
}

void save_csv(const ScalingReport& rep, const fs::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write report file '" + path.string() +
                             "'");
  write_scaling_csv(rep, out);
}

std::string format_exponent(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void holder_probe(const std::vector<double>& T_list, const fs::path& out_dir,
                  std::vector<ProbeCheck>& checks) {
  const std::vector<double> Ts =
      T_list.empty()
          ? std::vector<double>{1.0, 0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3}
          : T_list;
  const double pairs[3][2] = {{0.8, 4.0}, {0.75, 2.0}, {0.6, 3.0}};
  for (const auto& gp : pairs) {
    const double gamma = gp[0], p = gp[1];
    const double target = gamma - 1.0 / p - 0.05;
    const std::string tag =
        "g" + format_exponent(gamma) + "_p" + format_exponent(p);

    const ScalingReport lin =
        holder_embedding_check(linear_family(), gamma, p, Ts);
    save_csv(lin, out_dir / ("holder_linear_" + tag + ".csv"));
    checks.push_back(
        {"holder slope, linear family, " + tag, lin.slope >= target,
         lin.slope, target});

    const ScalingReport pow06 =
        holder_embedding_check(power_family(0.6), gamma, p, Ts);
    save_csv(pow06, out_dir / ("holder_power06_" + tag + ".csv"));
    checks.push_back(
        {"holder slope, power-0.6 family, " + tag, pow06.slope >= target,
         pow06.slope, target});

    ScalingReport worst;
    double worst_slope = 1e300;
    for (unsigned seed = 1; seed <= 20; ++seed) {
      const ScalingReport rb =
          holder_embedding_check(brownian_family(seed), gamma, p, Ts);
      if (rb.slope < worst_slope) {
        worst_slope = rb.slope;
        worst = rb;
      }
    }
    save_csv(worst, out_dir / ("holder_brownian_worst_" + tag + ".csv"));
    checks.push_back({"holder slope, rough-path worst of 20, " + tag,
                      worst_slope >= target, worst_slope, target});
  }
}

void basic_probe(const fs::path& out_dir, std::vector<ProbeCheck>& checks) {
  const int n = 257;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = 0.5 * i / static_cast<double>(n - 1);
  const DifferentiableSignal lin{make_uniform_signal(0.5, v),
                                 std::vector<double>(n, 1.0)};
  const BasicEstimatesReport rep = basic_estimates_check(lin, 4.0, 0.5);
  checks.push_back({"sup bound on phi(t) = t", rep.sup_bound_holds,
                    rep.sup_lhs, rep.sup_rhs});
  checks.push_back({"Lp bound on phi(t) = t", rep.lp_bound_holds, rep.lp_lhs,
                    rep.lp_rhs});
  const double target = (1.0 - 0.5) / 4.0 - 0.05;
  checks.push_back({"interpolation prefix slope on phi(t) = t",
                    rep.interpolation.slope >= target, rep.interpolation.slope,
                    target});
  save_csv(rep.interpolation, out_dir / "basic_interpolation.csv");

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_real_distribution<double> horizon(0.1, 1.0);
  int violations = 0;
  for (int draw = 0; draw < 100; ++draw) {
    std::vector<double> c(5);
    for (double& x : c) x = coeff(rng);
    const double T = horizon(rng);
    std::vector<double> pv(n), pd(n);
    for (int i = 0; i < n; ++i) {
      const double t = T * i / static_cast<double>(n - 1);
      double val = 0.0, der = 0.0, tp = 1.0;
      for (size_t k = 0; k < c.size(); ++k) {
        val += c[k] * tp;
        if (k + 1 < c.size())
          der += c[k + 1] * static_cast<double>(k + 1) * tp;
        tp *= t;
      }
      pv[i] = val;
      pd[i] = der;
    }
    const DifferentiableSignal s{make_uniform_signal(T, std::move(pv)),
                                 std::move(pd)};
    const BasicEstimatesReport r = basic_estimates_check(s, 3.0, 0.4);
    if (!r.sup_bound_holds || !r.lp_bound_holds) ++violations;
  }
  checks.push_back({"violations over 100 random polynomials", violations == 0,
                    static_cast<double>(violations), 0.0});
}

void lipschitz_probe(const std::vector<double>& T_list,
                     const fs::path& out_dir,
                     std::vector<ProbeCheck>& checks) {
  const std::vector<double> Ts =
      T_list.empty() ? std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4} : T_list;
  const Mesh mesh = structured_square_mesh(12, 12, {Side::left});
  const char* names[3] = {"stvk", "fung", "ogden"};
  for (int m = 0; m < 3; ++m) {
    SimConfig cfg;
    if (m == 1) cfg.material = Fung{0.1, 0.8, 1.2};
    if (m == 2) cfg.material = Ogden{{{0.5, 3.0}, {0.3, -2.0}}};
    const LipschitzProbeReport rep = lipschitz_scaling_probe(cfg, mesh, Ts);
    const std::string tag = names[m];
    if (m == 0) {
      save_csv(rep.internal_force, out_dir / "lipschitz_internal_force.csv");
      save_csv(rep.boundary_traction,
               out_dir / "lipschitz_boundary_traction.csv");
      save_csv(rep.flux_functional, out_dir / "lipschitz_flux.csv");
    }
    checks.push_back({"internal-force slope lower bound, " + tag,
                      rep.internal_force.slope >= 0.9,
                      rep.internal_force.slope, 0.9});
    checks.push_back({"internal-force slope upper bound, " + tag,
                      rep.internal_force.slope <= 1.1,
                      rep.internal_force.slope, 1.1});
    checks.push_back({"boundary-traction slope, " + tag,
                      rep.boundary_traction.slope >= 0.9,
                      rep.boundary_traction.slope, 0.9});
    checks.push_back({"flux-functional slope, " + tag,
                      rep.flux_functional.slope >= 0.9,
                      rep.flux_functional.slope, 0.9});
  }
}

void cofactor_probe(std::vector<ProbeCheck>& checks) {
  const Mesh mesh = structured_square_mesh(12, 12, {Side::left});
  const DofMap dofs = make_dof_map(mesh);
  const auto [v1, v2] = default_probe_fields(mesh, dofs);
  const std::vector<std::pair<NodalField, NodalField>> pairs = {
      {0.3 * v1, 0.2 * v2}, {v1, NodalField(-0.5 * v1)}};
  const CofactorReport a = cofactor_lipschitz_check(pairs, mesh, 4096, 1234);
  const CofactorReport b = cofactor_lipschitz_check(pairs, mesh, 8192, 1234);
  checks.push_back({"planar cofactor ratio is one",
                    std::abs(a.max_ratio_2d - 1.0) <= 1e-12 &&
                        std::abs(a.min_ratio_2d - 1.0) <= 1e-12,
                    a.max_ratio_2d, 1.0});
  checks.push_back({"spatial cofactor constant bounded", a.c_emp_3d <= 1.0,
                    a.c_emp_3d, 1.0});
  checks.push_back({"spatial cofactor constant stable under doubling",
                    b.c_emp_3d <= 1.1 * a.c_emp_3d &&
                        b.c_emp_3d >= 0.9 * a.c_emp_3d,
                    b.c_emp_3d / a.c_emp_3d, 1.1});
}

MaterialModel named_material(const std::string& name) {
  if (name == "stvk") return StVK{1.0, 1.0};
  if (name == "fung") return Fung{0.1, 0.8, 1.2};
  if (name == "ogden") return Ogden{{{0.5, 3.0}, {0.3, -2.0}}};
  throw ConfigError("unknown material '" + name +
                    "' (expected stvk, fung or ogden)");
}

}  // namespace

int run_scenario(const RunConfig& cfg, std::ostream& log) {
  try {
    cfg.sim.validate();
    const Mesh mesh = build_mesh(cfg.mesh);
    fs::create_directories(cfg.output.directory);
    const fs::path csv_path =
        fs::path(cfg.output.directory) / cfg.output.csv_name;
    std::ofstream csv(csv_path);
    if (!csv) {
      log << "error: cannot write '" << csv_path.string() << "'\n";
      return 1;
    }
    csv << kCsvHeader << '\n' << std::setprecision(17);
    csv.flush();

    const RowSink sink = [&csv, &csv_path](const TimeSeriesRow& r) {
      write_row(csv, r);
      csv.flush();  // a crash leaves a valid prefix
      if (!csv)
        throw std::runtime_error("error writing '" + csv_path.string() + "'");
    };

    int row_index = -1;
    StateSink snapshots;
    if (cfg.output.snapshot_every > 0) {
      snapshots = [&row_index, &cfg, &mesh](const State& st) {
        ++row_index;
        if (row_index % cfg.output.snapshot_every != 0) return;
        char name[32];
        std::snprintf(name, sizeof(name), "snapshot_%06d.vtk", row_index);
        write_snapshot(mesh, st,
                       (fs::path(cfg.output.directory) / name).string());
      };
    }

    const auto [series, reason] = run(cfg.sim, mesh, sink, snapshots);
    log << std::setprecision(6);
    log << "rows written: " << series.size() << " to " << csv_path.string()
        << "\n";
    switch (reason.kind) {
      case Termination::reached_t_end:
        log << "reached t_end = " << series.back().t << "\n";
        return 0;
      case Termination::blow_up:
        log << "finite-time blow-up at t* = " << reason.t_star
            << " (dt floor exhausted)\n";
        return 2;
      case Termination::invertibility_lost:
        log << "local invertibility lost at t* = " << reason.t_star << "\n";
        return 3;
    }
    return 1;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IncompatibleInitialData& e) {
    log << "incompatible initial data: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_mms(int levels, std::ostream& log) {
  if (levels < 2 || levels > 5) {
    log << "error: --levels must lie in [2, 5]\n";
    return 1;
  }
  std::vector<int> ns;
  for (int k = 0, n = 8; k < levels; ++k, n *= 2) ns.push_back(n);
  const auto table = mms_convergence(ns, 0.1, 1.0);
  log << std::setprecision(17)
      << "n,h,dt,velocity_error,pressure_error,velocity_order\n";
  for (size_t i = 0; i < table.size(); ++i) {
    log << table[i].n << ',' << table[i].h << ',' << table[i].dt << ','
        << table[i].velocity_error << ',' << table[i].pressure_error << ',';
    if (i > 0)
      log << std::log2(table[i - 1].velocity_error /
                       table[i].velocity_error);
    log << '\n';
  }
  return 0;
}

int run_estlab(const std::string& probe, const std::vector<double>& T_list,
               const std::string& out_dir, std::ostream& log) {
  try {
    fs::create_directories(out_dir);
    std::vector<ProbeCheck> checks;
    const bool all = probe == "all";
    bool known = false;
    if (all || probe == "holder") {
      known = true;
      holder_probe(T_list, out_dir, checks);
    }
    if (all || probe == "basic") {
      known = true;
      basic_probe(out_dir, checks);
    }
    if (all || probe == "lipschitz") {
      known = true;
      lipschitz_probe(T_list, out_dir, checks);
    }
    if (all || probe == "cofactor") {
      known = true;
      cofactor_probe(checks);
    }
    if (!known) {
      log << "error: unknown probe '" << probe
          << "' (expected holder, basic, lipschitz, cofactor or all)\n";
      return 1;
    }
    write_probe_summary(checks, log);
    return all_pass(checks) ? 0 : 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_checkmat(const std::string& model, std::ostream& log) {
  MaterialModel mat;
  try {
    mat = named_material(model);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }

  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> entry(-0.15, 0.15);
  const double eps = 1e-6;
  double worst_grad = 0.0;
  double worst_jac = 0.0;
  for (int draw = 0; draw < 40; ++draw) {
    Mat2 g, h;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        g(i, j) = entry(rng);
        h(i, j) = entry(rng);
      }
    h /= h.norm();

    // Stress against the energy gradient.
    const double w_plus =
        energy_density<2>(mat, green_st_venant(Mat2(g + eps * h)));
    const double w_minus =
        energy_density<2>(mat, green_st_venant(Mat2(g - eps * h)));
    const double fd = (w_plus - w_minus) / (2.0 * eps);
    const double exact = frobenius_dot<double, 2>(first_piola<2>(mat, g), h);
    worst_grad = std::max(worst_grad,
                          std::abs(fd - exact) / std::max(1.0, std::abs(exact)));

    // Stress derivative against stress differences.
    const Mat2 sig_plus = first_piola<2>(mat, Mat2(g + eps * h));
    const Mat2 sig_minus = first_piola<2>(mat, Mat2(g - eps * h));
    const Mat2 fd_dir = (sig_plus - sig_minus) / (2.0 * eps);
    const Mat2 exact_dir = first_piola_derivative<2>(mat, g, h);
    worst_jac =
        std::max(worst_jac, (fd_dir - exact_dir).norm() /
                                std::max(1.0, exact_dir.norm()));
  }

  const double tol = 1e-5;
  std::vector<ProbeCheck> checks = {
      {"stress matches energy gradient (" + model + ")", worst_grad <= tol,
       worst_grad, tol},
      {"stress derivative matches stress differences (" + model + ")",
       worst_jac <= tol, worst_jac, tol},
  };
  write_probe_summary(checks, log);
  return all_pass(checks) ? 0 : 1;
}

}  // namespace velast
