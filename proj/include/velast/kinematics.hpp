#pragma once

// Small-matrix kinematics for finite deformation: deformation gradient,
// Green-St.Venant strain, cofactor calculus and spectral matrix powers.
// Everything here is dimension-generic over d = 2, 3 and templated on the
// scalar so the routines stay usable with FD/AD scalar types.

#include <Eigen/Dense>
#include <cmath>

#include "velast/errors.hpp"

namespace velast {

template <typename Scalar, int Dim>
using Mat = Eigen::Matrix<Scalar, Dim, Dim>;

template <typename Scalar, int Dim>
using Vec = Eigen::Matrix<Scalar, Dim, 1>;

// Symmetric matrix with the mirror equality holding exactly: both triangles
// are assigned from the same rounded value, never recomputed.
template <typename Scalar, int Dim>
class SymMat {
 public:
  using Matrix = Mat<Scalar, Dim>;

  SymMat() : m_(Matrix::Zero()) {}

  // Takes the symmetric part of an arbitrary matrix.
  explicit SymMat(const Matrix& a) {
    for (int i = 0; i < Dim; ++i) {
      m_(i, i) = a(i, i);
      for (int j = i + 1; j < Dim; ++j) {
        const Scalar v = Scalar(0.5) * (a(i, j) + a(j, i));
        m_(i, j) = v;
        m_(j, i) = v;
      }
    }
  }

  static SymMat identity() { return SymMat(Matrix::Identity()); }
  static SymMat zero() { return SymMat(); }

  const Matrix& mat() const { return m_; }
  Scalar operator()(int i, int j) const { return m_(i, j); }

  Scalar trace() const { return m_.trace(); }

  SymMat operator+(const SymMat& o) const { return SymMat(Matrix(m_ + o.m_)); }
  SymMat operator-(const SymMat& o) const { return SymMat(Matrix(m_ - o.m_)); }
  SymMat operator*(Scalar s) const { return SymMat(Matrix(m_ * s)); }

  friend SymMat operator*(Scalar s, const SymMat& a) { return a * s; }

 private:
  Matrix m_;
};

template <typename Scalar, int Dim>
Mat<Scalar, Dim> deformation_gradient(const Mat<Scalar, Dim>& grad_u) {
  return Mat<Scalar, Dim>::Identity() + grad_u;
}

// E(u) = 1/2 (Phi^T Phi - I) = 1/2 (G + G^T + G^T G), exactly symmetric.
template <typename Scalar, int Dim>
SymMat<Scalar, Dim> green_st_venant(const Mat<Scalar, Dim>& grad_u) {
  const Mat<Scalar, Dim> h =
      Scalar(0.5) * (grad_u + grad_u.transpose() +
                     Mat<Scalar, Dim>(grad_u.transpose() * grad_u));
  return SymMat<Scalar, Dim>(h);
}

// Polynomial cofactor, defined for every matrix (no inverse involved).
template <typename Scalar>
Mat<Scalar, 2> cofactor(const Mat<Scalar, 2>& a) {
  Mat<Scalar, 2> c;
  c(0, 0) = a(1, 1);
  c(0, 1) = -a(1, 0);
  c(1, 0) = -a(0, 1);
  c(1, 1) = a(0, 0);
  return c;
}

template <typename Scalar>
Mat<Scalar, 3> cofactor(const Mat<Scalar, 3>& a) {
  Mat<Scalar, 3> c;
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      // signed 2x2 minor; the cyclic index choice absorbs the (-1)^(i+j)
      c(i, j) = a(i1, j1) * a(i2, j2) - a(i1, j2) * a(i2, j1);
    }
  }
  return c;
}

template <typename Scalar, int Dim>
Scalar frobenius_dot(const Mat<Scalar, Dim>& a, const Mat<Scalar, Dim>& b) {
  return (a.array() * b.array()).sum();
}

// d/ds det(A + sH) at s = 0, i.e. cof(A) : H.
template <typename Scalar, int Dim>
Scalar det_directional_derivative(const Mat<Scalar, Dim>& a,
                                  const Mat<Scalar, Dim>& h) {
  return frobenius_dot<Scalar, Dim>(cofactor(a), h);
}

namespace detail {

inline bool is_nonnegative_integer(double x) {
  return x >= 0.0 && x == std::floor(x);
}

// pow that stays defined for non-positive bases when the exponent is a
// nonnegative integer (plain polynomial power).
inline double real_pow(double base, double expo) {
  if (is_nonnegative_integer(expo)) {
    double r = 1.0;
    for (int k = 0; k < static_cast<int>(expo); ++k) r *= base;
    return r;
  }
  return std::pow(base, expo);
}

}  // namespace detail

inline constexpr double kEigenvalueFloor = 1e-12;

// Spectral power S^gamma. Nonnegative integer gamma is a polynomial and
// needs no positivity; any other gamma requires eigenvalues > 1e-12.
template <typename Scalar, int Dim>
SymMat<Scalar, Dim> sym_matrix_power(const SymMat<Scalar, Dim>& s,
                                     double gamma) {
  static_assert(std::is_same_v<Scalar, double>,
                "spectral power implemented for double");
  Eigen::SelfAdjointEigenSolver<Mat<Scalar, Dim>> es(s.mat());
  Vec<Scalar, Dim> lam = es.eigenvalues();
  if (!detail::is_nonnegative_integer(gamma) &&
      lam.minCoeff() <= kEigenvalueFloor) {
    throw NonPositiveEigenvalue(
        "matrix power with non-integer exponent needs eigenvalues > 1e-12");
  }
  Vec<Scalar, Dim> plam;
  for (int i = 0; i < Dim; ++i) plam(i) = detail::real_pow(lam(i), gamma);
  const Mat<Scalar, Dim> v = es.eigenvectors();
  return SymMat<Scalar, Dim>(
      Mat<Scalar, Dim>(v * plam.asDiagonal() * v.transpose()));
}

// Fourth-order tensor acting linearly on d x d matrices, stored flat with
// row-major pair index (i,j) -> i*d+j. The dyad convention throughout is
// (A (x) B) C = (B : C) A.
template <typename Scalar, int Dim>
class Tensor4 {
 public:
  static constexpr int kFlat = Dim * Dim;
  using Flat = Eigen::Matrix<Scalar, kFlat, kFlat>;
  using Matrix = Mat<Scalar, Dim>;

  Tensor4() : t_(Flat::Zero()) {}
  explicit Tensor4(const Flat& t) : t_(t) {}

  static Tensor4 zero() { return Tensor4(); }
  static Tensor4 identity() { return Tensor4(Flat::Identity()); }

  static Tensor4 outer(const Matrix& a, const Matrix& b) {
    return Tensor4(Flat(flatten(a) * flatten(b).transpose()));
  }

  Matrix apply(const Matrix& h) const { return unflatten(t_ * flatten(h)); }

  SymMat<Scalar, Dim> apply(const SymMat<Scalar, Dim>& h) const {
    return SymMat<Scalar, Dim>(apply(h.mat()));
  }

  Scalar operator()(int i, int j, int k, int l) const {
    return t_(i * Dim + j, k * Dim + l);
  }

  Tensor4 operator+(const Tensor4& o) const { return Tensor4(Flat(t_ + o.t_)); }
  Tensor4 operator-(const Tensor4& o) const { return Tensor4(Flat(t_ - o.t_)); }
  Tensor4 operator*(Scalar s) const { return Tensor4(Flat(t_ * s)); }
  Tensor4& operator+=(const Tensor4& o) {
    t_ += o.t_;
    return *this;
  }

  friend Tensor4 operator*(Scalar s, const Tensor4& t) { return t * s; }

  const Flat& flat() const { return t_; }

  static Eigen::Matrix<Scalar, kFlat, 1> flatten(const Matrix& m) {
    Eigen::Matrix<Scalar, kFlat, 1> v;
    for (int i = 0; i < Dim; ++i)
      for (int j = 0; j < Dim; ++j) v(i * Dim + j) = m(i, j);
    return v;
  }

  static Matrix unflatten(const Eigen::Matrix<Scalar, kFlat, 1>& v) {
    Matrix m;
    for (int i = 0; i < Dim; ++i)
      for (int j = 0; j < Dim; ++j) m(i, j) = v(i * Dim + j);
    return m;
  }

 private:
  Flat t_;
};

using Mat2 = Mat<double, 2>;
using Mat3 = Mat<double, 3>;
using SymMat2 = SymMat<double, 2>;
using SymMat3 = SymMat<double, 3>;
using Tensor42 = Tensor4<double, 2>;
using Tensor43 = Tensor4<double, 3>;

}  // namespace velast
