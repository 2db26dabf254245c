#pragma once

// Hyperelastic constitutive families expressed through the Green-St.Venant
// strain E: quadratic (St.Venant-Kirchhoff), exponential (Fung-type) and
// spectral power (Ogden-type). Each family provides the stored energy, the
// second Piola-Kirchhoff stress Sigma = dW/dE and its exact tangent d2W/dE2,
// plus the first Piola-Kirchhoff maps sigma(grad u) = Phi Sigma and their
// directional derivative.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "velast/errors.hpp"
#include "velast/kinematics.hpp"

namespace velast {

struct StVK {
  double mu = 1.0;      // > 0
  double lambda = 1.0;  // >= 0
};

struct Fung {
  double w0 = 0.0;    // >= 0, additive offset only
  double beta = 1.0;  // > 0
  double gamma = 1.0; // > 0
};

struct OgdenTerm {
  double coeff = 1.0;
  double gamma = 2.0;
};

struct Ogden {
  std::vector<OgdenTerm> terms;  // nonempty
};

using MaterialModel = std::variant<StVK, Fung, Ogden>;

inline void validate(const MaterialModel& model) {
  if (const auto* m = std::get_if<StVK>(&model)) {
    if (!(m->mu > 0.0)) throw InvalidArgument("StVK: mu must be > 0");
    if (!(m->lambda >= 0.0)) throw InvalidArgument("StVK: lambda must be >= 0");
  } else if (const auto* m = std::get_if<Fung>(&model)) {
    if (!(m->w0 >= 0.0)) throw InvalidArgument("Fung: w0 must be >= 0");
    if (!(m->beta > 0.0)) throw InvalidArgument("Fung: beta must be > 0");
    if (!(m->gamma > 0.0)) throw InvalidArgument("Fung: gamma must be > 0");
  } else {
    const auto& og = std::get<Ogden>(model);
    if (og.terms.empty())
      throw InvalidArgument("Ogden: needs at least one term");
  }
}

namespace detail {

// Power with the positivity contract of sym_matrix_power: nonnegative
// integer exponents are polynomial, anything else needs base > 1e-12.
inline double checked_pow(double base, double expo) {
  if (!is_nonnegative_integer(expo) && base <= kEigenvalueFloor) {
    throw NonPositiveEigenvalue(
        "Ogden power with non-integer exponent needs 2E+I positive definite");
  }
  return real_pow(base, expo);
}

// Per-eigenvalue Ogden stress f(mu) = 2 c gamma (2 mu + 1)^(gamma-1).
inline double ogden_f(const OgdenTerm& t, double mu) {
  const double c = 2.0 * t.coeff * t.gamma;
  if (c == 0.0) return 0.0;
  return c * checked_pow(2.0 * mu + 1.0, t.gamma - 1.0);
}

inline double ogden_fprime(const OgdenTerm& t, double mu) {
  const double c = 4.0 * t.coeff * t.gamma * (t.gamma - 1.0);
  if (c == 0.0) return 0.0;
  return c * checked_pow(2.0 * mu + 1.0, t.gamma - 2.0);
}

// Threshold below which the secant (f(mu_i)-f(mu_j))/(mu_i-mu_j) is replaced
// by its analytic limit to keep the spectral tangent well conditioned.
inline constexpr double kEigenvalueGap = 1e-7;

inline double ogden_secant(const OgdenTerm& t, double mu_i, double mu_j) {
  if (std::abs(mu_i - mu_j) < kEigenvalueGap)
    return ogden_fprime(t, 0.5 * (mu_i + mu_j));
  return (ogden_f(t, mu_i) - ogden_f(t, mu_j)) / (mu_i - mu_j);
}

}  // namespace detail

template <int Dim>
double energy_density(const MaterialModel& model, const SymMat<double, Dim>& e) {
  if (const auto* m = std::get_if<StVK>(&model)) {
    const double tr_e2 = frobenius_dot<double, Dim>(e.mat(), e.mat());
    const double tr_e = e.trace();
    return m->mu * tr_e2 + 0.5 * m->lambda * tr_e * tr_e;
  }
  if (const auto* m = std::get_if<Fung>(&model)) {
    const double tr_e2 = frobenius_dot<double, Dim>(e.mat(), e.mat());
    return m->w0 + m->beta * (std::exp(m->gamma * tr_e2) - 1.0);
  }
  const auto& og = std::get<Ogden>(model);
  Eigen::SelfAdjointEigenSolver<Mat<double, Dim>> es(e.mat());
  double w = 0.0;
  for (const auto& t : og.terms) {
    if (t.coeff == 0.0) continue;
    double tr_pow = 0.0;
    for (int i = 0; i < Dim; ++i)
      tr_pow += detail::checked_pow(2.0 * es.eigenvalues()(i) + 1.0, t.gamma);
    w += t.coeff * (tr_pow - static_cast<double>(Dim));
  }
  return w;
}

template <int Dim>
SymMat<double, Dim> second_piola(const MaterialModel& model,
                                 const SymMat<double, Dim>& e) {
  using M = Mat<double, Dim>;
  if (const auto* m = std::get_if<StVK>(&model)) {
    return SymMat<double, Dim>(
        M(2.0 * m->mu * e.mat() + m->lambda * e.trace() * M::Identity()));
  }
  if (const auto* m = std::get_if<Fung>(&model)) {
    const double tr_e2 = frobenius_dot<double, Dim>(e.mat(), e.mat());
    const double s = 2.0 * m->gamma * m->beta * std::exp(m->gamma * tr_e2);
    return SymMat<double, Dim>(M(s * e.mat()));
  }
  const auto& og = std::get<Ogden>(model);
  Eigen::SelfAdjointEigenSolver<M> es(e.mat());
  M sigma = M::Zero();
  for (int i = 0; i < Dim; ++i) {
    double f = 0.0;
    for (const auto& t : og.terms) f += detail::ogden_f(t, es.eigenvalues()(i));
    const Vec<double, Dim> v = es.eigenvectors().col(i);
    sigma += f * (v * v.transpose());
  }
  return SymMat<double, Dim>(sigma);
}

template <int Dim>
Tensor4<double, Dim> second_piola_derivative(const MaterialModel& model,
                                             const SymMat<double, Dim>& e) {
  using M = Mat<double, Dim>;
  using T4 = Tensor4<double, Dim>;
  if (const auto* m = std::get_if<StVK>(&model)) {
    return 2.0 * m->mu * T4::identity() +
           m->lambda * T4::outer(M::Identity(), M::Identity());
  }
  if (const auto* m = std::get_if<Fung>(&model)) {
    const double tr_e2 = frobenius_dot<double, Dim>(e.mat(), e.mat());
    const double g = m->gamma;
    const double s = m->beta * std::exp(g * tr_e2);
    return (2.0 * g * s) * T4::identity() +
           (4.0 * g * g * s) * T4::outer(e.mat(), e.mat());
  }
  // Spectral tangent: on the eigenbasis dyads (v_i v_j^T) the tangent acts
  // by f'(mu_i) on the diagonal and by secants across distinct eigenvalues.
  const auto& og = std::get<Ogden>(model);
  Eigen::SelfAdjointEigenSolver<M> es(e.mat());
  T4 tangent = T4::zero();
  for (int i = 0; i < Dim; ++i) {
    for (int j = 0; j < Dim; ++j) {
      double c = 0.0;
      for (const auto& t : og.terms) {
        c += (i == j)
                 ? detail::ogden_fprime(t, es.eigenvalues()(i))
                 : detail::ogden_secant(t, es.eigenvalues()(i),
                                        es.eigenvalues()(j));
      }
      if (c == 0.0) continue;
      const M dyad = es.eigenvectors().col(i) * es.eigenvectors().col(j).transpose();
      tangent += c * T4::outer(dyad, dyad);
    }
  }
  return tangent;
}

// sigma(grad u) = Phi(u) Sigma(E(u)).
template <int Dim>
Mat<double, Dim> first_piola(const MaterialModel& model,
                             const Mat<double, Dim>& grad_u) {
  const Mat<double, Dim> phi = deformation_gradient(grad_u);
  return phi * second_piola(model, green_st_venant(grad_u)).mat();
}

// Directional derivative of grad u -> sigma(grad u) along grad v:
//   sigma'(grad u).grad v = grad v Sigma + Phi [d2W/dE2 . (E'(u).grad v)]
// with E'(u).grad v = sym(Phi^T grad v).
template <int Dim>
Mat<double, Dim> first_piola_derivative(const MaterialModel& model,
                                        const Mat<double, Dim>& grad_u,
                                        const Mat<double, Dim>& grad_v) {
  const Mat<double, Dim> phi = deformation_gradient(grad_u);
  const SymMat<double, Dim> e = green_st_venant(grad_u);
  const SymMat<double, Dim> de(Mat<double, Dim>(phi.transpose() * grad_v));
  const SymMat<double, Dim> dsigma =
      second_piola_derivative<Dim>(model, e).apply(de);
  return grad_v * second_piola(model, e).mat() + phi * dsigma.mat();
}

inline std::string material_name(const MaterialModel& model) {
  if (std::holds_alternative<StVK>(model)) return "stvk";
  if (std::holds_alternative<Fung>(model)) return "fung";
  return "ogden";
}

}  // namespace velast
