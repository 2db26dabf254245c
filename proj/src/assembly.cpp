#include "velast/assembly.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

#include "velast/parallel.hpp"

namespace velast {

int solver_threads() {
  static const int cached = [] {
    const char* env = std::getenv("SOLVER_THREADS");
    int requested = 0;
    if (env && *env) requested = std::atoi(env);
    if (requested <= 0)
      requested = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, requested);
  }();
  return cached;
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int threads = std::min(solver_threads(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk, end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] {
      for (int i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

DofMap make_dof_map(const Mesh& mesh) {
  DofMap dofs;
  dofs.n_nodes = static_cast<int>(mesh.nodes.size());
  dofs.is_dirichlet.assign(dofs.n_dofs(), false);
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != 'D') continue;
    for (int node : {be.a, be.b}) {
      dofs.is_dirichlet[DofMap::dof(node, 0)] = true;
      dofs.is_dirichlet[DofMap::dof(node, 1)] = true;
    }
  }
  for (int d = 0; d < dofs.n_dofs(); ++d)
    if (dofs.is_dirichlet[d]) dofs.dirichlet_dofs.push_back(d);
  return dofs;
}

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Eigen::Vector2d a = mesh.nodes[tri[0]], b = mesh.nodes[tri[1]],
                        c = mesh.nodes[tri[2]];
  ElementGeometry geom;
  const Eigen::Vector2d u = b - a, v = c - a;
  geom.area = 0.5 * (u.x() * v.y() - u.y() * v.x());
  const double inv2a = 1.0 / (2.0 * geom.area);
  // grad phi_k = perp(opposite edge) / (2 area)
  geom.grad.col(0) = inv2a * Eigen::Vector2d(b.y() - c.y(), c.x() - b.x());
  geom.grad.col(1) = inv2a * Eigen::Vector2d(c.y() - a.y(), a.x() - c.x());
  geom.grad.col(2) = inv2a * Eigen::Vector2d(a.y() - b.y(), b.x() - a.x());
  return geom;
}

Mat2 element_grad(const Mesh& mesh, int t, const NodalField& u) {
  const ElementGeometry geom = element_geometry(mesh, t);
  const auto& tri = mesh.triangles[t];
  Eigen::Matrix<double, 2, 3> vals;
  for (int k = 0; k < 3; ++k)
    vals.col(k) = u.segment<2>(DofMap::dof(tri[k], 0));
  return vals * geom.grad.transpose();
}

SparseMatrix assemble_mass(const Mesh& mesh) {
  const int n = 2 * static_cast<int>(mesh.nodes.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 18);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double a = triangle_area(mesh, static_cast<int>(t));
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double m = (i == j ? 2.0 : 1.0) * a / 12.0;
        for (int c = 0; c < 2; ++c)
          trip.emplace_back(DofMap::dof(tri[i], c), DofMap::dof(tri[j], c), m);
      }
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix assemble_diffusion(const Mesh& mesh, double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be > 0");
  const int n = 2 * static_cast<int>(mesh.nodes.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 18);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const ElementGeometry geom = element_geometry(mesh, static_cast<int>(t));
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double k =
            kappa * geom.area * geom.grad.col(i).dot(geom.grad.col(j));
        for (int c = 0; c < 2; ++c)
          trip.emplace_back(DofMap::dof(tri[i], c), DofMap::dof(tri[j], c), k);
      }
    }
  }
  SparseMatrix k(n, n);
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

NodalField assemble_internal_force(const Mesh& mesh, const MaterialModel& model,
                                   const NodalField& u) {
  const int n_tri = static_cast<int>(mesh.triangles.size());
  // per-element kernels in parallel, serial accumulation for determinism
  std::vector<Eigen::Matrix<double, 2, 3>> local(n_tri);
  std::exception_ptr error;
  std::mutex error_mutex;
  parallel_for(n_tri, [&](int t) {
    try {
      const ElementGeometry geom = element_geometry(mesh, t);
      const Mat2 grad_u = element_grad(mesh, t, u);
      const Mat2 sigma = first_piola<2>(model, grad_u);
      local[t] = -geom.area * (sigma * geom.grad);
    } catch (...) {
      std::scoped_lock lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);

  NodalField r = NodalField::Zero(2 * mesh.nodes.size());
  for (int t = 0; t < n_tri; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k)
      r.segment<2>(DofMap::dof(tri[k], 0)) += local[t].col(k);
  }
  return r;
}

SparseMatrix assemble_internal_force_jacobian(const Mesh& mesh,
                                              const MaterialModel& model,
                                              const NodalField& u) {
  const int n_tri = static_cast<int>(mesh.triangles.size());
  const int n = 2 * static_cast<int>(mesh.nodes.size());
  std::vector<Eigen::Matrix<double, 6, 6>> local(n_tri);
  std::exception_ptr error;
  std::mutex error_mutex;
  parallel_for(n_tri, [&](int t) {
    try {
      const ElementGeometry geom = element_geometry(mesh, t);
      const Mat2 grad_u = element_grad(mesh, t, u);
      for (int l = 0; l < 3; ++l) {
        for (int d = 0; d < 2; ++d) {
          // direction field: basis function l moving in component d
          Mat2 dir = Mat2::Zero();
          dir.row(d) = geom.grad.col(l).transpose();
          const Mat2 dsigma = first_piola_derivative<2>(model, grad_u, dir);
          const Eigen::Matrix<double, 2, 3> col = -geom.area * (dsigma * geom.grad);
          for (int k = 0; k < 3; ++k)
            for (int c = 0; c < 2; ++c)
              local[t](2 * k + c, 2 * l + d) = col(c, k);
        }
      }
    } catch (...) {
      std::scoped_lock lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(n_tri) * 36);
  for (int t = 0; t < n_tri; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < 2; ++c)
        for (int l = 0; l < 3; ++l)
          for (int d = 0; d < 2; ++d)
            trip.emplace_back(DofMap::dof(tri[k], c), DofMap::dof(tri[l], d),
                              local[t](2 * k + c, 2 * l + d));
  }
  SparseMatrix j(n, n);
  j.setFromTriplets(trip.begin(), trip.end());
  return j;
}

namespace {

// 2-point Gauss positions on the unit interval.
constexpr double kGaussA = 0.5 - 0.28867513459481287;  // 1/2 - 1/(2 sqrt 3)
constexpr double kGaussB = 0.5 + 0.28867513459481287;

}  // namespace

NodalField assemble_neumann_load(const Mesh& mesh, const BoundaryFunction& g,
                                 double t) {
  NodalField l = NodalField::Zero(2 * mesh.nodes.size());
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    if (be.tag != 'N') continue;
    const Eigen::Vector2d xa = mesh.nodes[be.a], xb = mesh.nodes[be.b];
    const double len = (xb - xa).norm();
    const Eigen::Vector2d n = edge_normal(mesh, static_cast<int>(e));
    for (double xi : {kGaussA, kGaussB}) {
      const Eigen::Vector2d x = (1.0 - xi) * xa + xi * xb;
      const Eigen::Vector2d gv = g(x, t, n);
      const double w = 0.5 * len;
      l.segment<2>(DofMap::dof(be.a, 0)) += w * (1.0 - xi) * gv;
      l.segment<2>(DofMap::dof(be.b, 0)) += w * xi * gv;
    }
  }
  return l;
}

NodalField assemble_volume_load(const Mesh& mesh, const VolumeFunction& f,
                                double t) {
  NodalField l = NodalField::Zero(2 * mesh.nodes.size());
  for (size_t tr = 0; tr < mesh.triangles.size(); ++tr) {
    const auto& tri = mesh.triangles[tr];
    const double area = triangle_area(mesh, static_cast<int>(tr));
    const Eigen::Vector2d x0 = mesh.nodes[tri[0]], x1 = mesh.nodes[tri[1]],
                          x2 = mesh.nodes[tri[2]];
    // edge-midpoint rule, exact for quadratic integrands
    const Eigen::Vector2d m01 = 0.5 * (x0 + x1), m12 = 0.5 * (x1 + x2),
                          m20 = 0.5 * (x2 + x0);
    const Eigen::Vector2d f01 = f(m01, t), f12 = f(m12, t), f20 = f(m20, t);
    // phi_k at the midpoints: 1/2 on adjacent edges, 0 on the opposite one
    const double w = area / 3.0;
    l.segment<2>(DofMap::dof(tri[0], 0)) += w * 0.5 * (f01 + f20);
    l.segment<2>(DofMap::dof(tri[1], 0)) += w * 0.5 * (f01 + f12);
    l.segment<2>(DofMap::dof(tri[2], 0)) += w * 0.5 * (f12 + f20);
  }
  return l;
}

NodalField assemble_constraint_row(const Mesh& mesh, const NodalField& u) {
  NodalField b = NodalField::Zero(2 * mesh.nodes.size());
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    if (be.tag != 'N') continue;
    const Mat2 grad_u = element_grad(mesh, mesh.edge_triangle[e], u);
    const Mat2 cof = cofactor(deformation_gradient(grad_u));
    const Eigen::Vector2d w = 0.5 * edge_length(mesh, static_cast<int>(e)) *
                              (cof * edge_normal(mesh, static_cast<int>(e)));
    b.segment<2>(DofMap::dof(be.a, 0)) += w;
    b.segment<2>(DofMap::dof(be.b, 0)) += w;
  }
  return b;
}

double enclosed_volume(const Mesh& mesh, const NodalField& u) {
  double vol = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Mat2 phi = deformation_gradient(element_grad(mesh, static_cast<int>(t), u));
    vol += triangle_area(mesh, static_cast<int>(t)) * phi.determinant();
  }
  return vol;
}

double min_det(const Mesh& mesh, const NodalField& u) {
  double lo = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Mat2 phi = deformation_gradient(element_grad(mesh, static_cast<int>(t), u));
    lo = std::min(lo, phi.determinant());
  }
  return lo;
}

NodalField nonlinear_boundary_rhs(const Mesh& mesh, const MaterialModel&,
                                  const NodalField& u, double p) {
  NodalField l = NodalField::Zero(2 * mesh.nodes.size());
  if (p == 0.0) return l;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    if (be.tag != 'N') continue;
    const Mat2 grad_u = element_grad(mesh, mesh.edge_triangle[e], u);
    const Mat2 cof = cofactor(deformation_gradient(grad_u));
    const Eigen::Vector2d n = edge_normal(mesh, static_cast<int>(e));
    const Eigen::Vector2d w =
        0.5 * edge_length(mesh, static_cast<int>(e)) * p * ((n - cof * n));
    l.segment<2>(DofMap::dof(be.a, 0)) += w;
    l.segment<2>(DofMap::dof(be.b, 0)) += w;
  }
  return l;
}

NodalField sigma_normal_traction(const Mesh& mesh, const MaterialModel& model,
                                 const NodalField& u) {
  NodalField l = NodalField::Zero(2 * mesh.nodes.size());
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    if (be.tag != 'N') continue;
    const Mat2 grad_u = element_grad(mesh, mesh.edge_triangle[e], u);
    const Mat2 sigma = first_piola<2>(model, grad_u);
    const Eigen::Vector2d w = 0.5 * edge_length(mesh, static_cast<int>(e)) *
                              (sigma * edge_normal(mesh, static_cast<int>(e)));
    l.segment<2>(DofMap::dof(be.a, 0)) += w;
    l.segment<2>(DofMap::dof(be.b, 0)) += w;
  }
  return l;
}

double constraint_rhs_H(const Mesh& mesh, const NodalField& u,
                        const NodalField& v) {
  double h = 0.0;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    if (be.tag != 'N') continue;
    const Mat2 grad_u = element_grad(mesh, mesh.edge_triangle[e], u);
    const Mat2 cof = cofactor(deformation_gradient(grad_u));
    const Eigen::Vector2d n = edge_normal(mesh, static_cast<int>(e));
    const Eigen::Vector2d m = n - cof * n;
    const Eigen::Vector2d v_avg =
        0.5 * (v.segment<2>(DofMap::dof(be.a, 0)) +
               v.segment<2>(DofMap::dof(be.b, 0)));
    h += edge_length(mesh, static_cast<int>(e)) * v_avg.dot(m);
  }
  return h;
}

void apply_dirichlet(SparseMatrix& a, const DofMap& dofs) {
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      if (dofs.is_dirichlet[it.row()] || dofs.is_dirichlet[it.col()])
        it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    }
  }
}

void zero_dirichlet(NodalField& v, const DofMap& dofs) {
  for (int d : dofs.dirichlet_dofs) v(d) = 0.0;
}

NodalField interpolate(const Mesh& mesh,
                       const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f) {
  NodalField u(2 * mesh.nodes.size());
  for (size_t i = 0; i < mesh.nodes.size(); ++i)
    u.segment<2>(2 * i) = f(mesh.nodes[i]);
  return u;
}

double total_strain_energy(const Mesh& mesh, const MaterialModel& model,
                           const NodalField& u) {
  double w = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Mat2 grad_u = element_grad(mesh, static_cast<int>(t), u);
    w += triangle_area(mesh, static_cast<int>(t)) *
         energy_density<2>(model, green_st_venant(grad_u));
  }
  return w;
}

}  // namespace velast
