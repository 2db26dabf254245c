#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "velast/kinematics.hpp"

using namespace velast;

TEST_CASE("deformation gradient is I + grad u") {
  Mat2 g;
  g << 0.1, 0.0, 0.0, 0.0;
  Mat2 phi = deformation_gradient(g);
  CHECK(phi(0, 0) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(phi(1, 1) == 1.0);
  CHECK(phi(0, 1) == 0.0);
}

TEST_CASE("green strain: frozen uniaxial value and exact symmetry") {
  Mat2 g = Mat2::Zero();
  g(0, 0) = 0.2;
  SymMat2 e = green_st_venant(g);
  // Phi = diag(1.2, 1): E = diag((1.44-1)/2, 0)
  CHECK(e(0, 0) == doctest::Approx(0.22).epsilon(1e-15));
  CHECK(e(1, 1) == 0.0);
  CHECK(e(0, 1) == 0.0);

  std::mt19937 rng(7);
  for (int k = 0; k < 50; ++k) {
    Mat3 gu = oracle::random_matrix<3>(rng, 0.5);
    SymMat3 e3 = green_st_venant(gu);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(e3(i, j) == e3(j, i));
  }
}

TEST_CASE("green strain vanishes on rotations") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ang(-3.1, 3.1);
  for (int k = 0; k < 100; ++k) {
    Mat2 r2 = oracle::rotation2(ang(rng));
    SymMat2 e2 = green_st_venant(Mat2(r2 - Mat2::Identity()));
    CHECK(e2.mat().cwiseAbs().maxCoeff() <= 1e-13);

    Mat3 r3 = oracle::random_rotation3(rng);
    SymMat3 e3 = green_st_venant(Mat3(r3 - Mat3::Identity()));
    CHECK(e3.mat().cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("cofactor 2d: frozen entries and inverse-free identity") {
  Mat2 a;
  a << 2.0, 0.0, 0.0, 3.0;
  Mat2 c = cofactor(a);
  CHECK(c(0, 0) == 3.0);
  CHECK(c(1, 1) == 2.0);
  CHECK(c(0, 1) == 0.0);

  Mat2 b;
  b << 1.0, 2.0, 3.0, 4.0;
  Mat2 cb = cofactor(b);
  CHECK(cb(0, 0) == 4.0);
  CHECK(cb(0, 1) == -3.0);
  CHECK(cb(1, 0) == -2.0);
  CHECK(cb(1, 1) == 1.0);

  // cof(A) = det(A) A^-T on invertible matrices
  std::mt19937 rng(3);
  for (int k = 0; k < 50; ++k) {
    Mat2 m = Mat2::Identity() + oracle::random_matrix<2>(rng, 0.4);
    Mat2 ref = m.determinant() * m.inverse().transpose();
    CHECK((cofactor(m) - ref).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("cofactor 3d: inverse-free identity and det(cof) = det^2") {
  std::mt19937 rng(5);
  for (int k = 0; k < 50; ++k) {
    Mat3 m = Mat3::Identity() + oracle::random_matrix<3>(rng, 0.3);
    Mat3 ref = m.determinant() * m.inverse().transpose();
    CHECK((cofactor(m) - ref).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(cofactor(m).determinant() ==
          doctest::Approx(std::pow(m.determinant(), 2)).epsilon(1e-11));
  }
  // stays defined on singular matrices
  Mat3 s = Mat3::Zero();
  s(0, 0) = 1.0;
  Mat3 cs = cofactor(s);
  CHECK(cs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cofactor scaling: cof(tA) = t^(d-1) cof(A)") {
  std::mt19937 rng(9);
  Mat3 a = oracle::random_matrix<3>(rng, 1.0);
  Mat3 lhs = cofactor(Mat3(2.5 * a));
  Mat3 rhs = 2.5 * 2.5 * cofactor(a);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * rhs.cwiseAbs().maxCoeff());
}

TEST_CASE("det directional derivative matches FD of det") {
  std::mt19937 rng(13);
  for (int k = 0; k < 20; ++k) {
    Mat2 a2 = oracle::random_matrix<2>(rng, 1.0);
    Mat2 h2 = oracle::random_matrix<2>(rng, 1.0);
    // 2d det is quadratic: the central difference is exact up to roundoff
    const double fd2 =
        oracle::central_diff([&](double s) { return Mat2(a2 + s * h2).determinant(); }, 1e-3);
    CHECK(det_directional_derivative<double, 2>(a2, h2) ==
          doctest::Approx(fd2).epsilon(1e-10));

    Mat3 a3 = oracle::random_matrix<3>(rng, 1.0);
    Mat3 h3 = oracle::random_matrix<3>(rng, 1.0);
    const double exact = det_directional_derivative<double, 3>(a3, h3);
    const double order = oracle::fd_order(
        [&](double s) { return Mat3(a3 + s * h3).determinant(); }, exact, 1e-3);
    CHECK(order >= 1.9);  // second order confirms the derivative itself
  }
}

TEST_CASE("dilation: grad u = 0.1 I gives det Phi = 1.21") {
  Mat2 g = 0.1 * Mat2::Identity();
  CHECK(deformation_gradient(g).determinant() ==
        doctest::Approx(1.21).epsilon(1e-15));
}

TEST_CASE("spectral power: frozen sqrt, additivity, polynomial fallback") {
  Mat2 s;
  s << 4.0, 0.0, 0.0, 9.0;
  SymMat2 sq = sym_matrix_power(SymMat2(s), 0.5);
  CHECK(sq(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sq(1, 1) == doctest::Approx(3.0).epsilon(1e-14));

  std::mt19937 rng(17);
  Mat2 base = oracle::random_symmetric<2>(rng, 0.2);
  SymMat2 spd(Mat2(base + 2.0 * Mat2::Identity()));
  SymMat2 half = sym_matrix_power(spd, 0.5);
  CHECK((half.mat() * half.mat() - spd.mat()).cwiseAbs().maxCoeff() <= 1e-12);

  // integer power works on indefinite matrices (polynomial meaning)
  Mat2 ind;
  ind << -1.0, 0.5, 0.5, -2.0;
  SymMat2 sq2 = sym_matrix_power(SymMat2(ind), 2.0);
  CHECK((sq2.mat() - Mat2(ind * ind)).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(sym_matrix_power(SymMat2(ind), 0.5), NonPositiveEigenvalue);
  Mat2 tiny = 1e-13 * Mat2::Identity();
  CHECK_THROWS_AS(sym_matrix_power(SymMat2(tiny), 0.5), NonPositiveEigenvalue);
}

TEST_CASE("tensor4: identity action and dyad convention (A x B) C = (B:C) A") {
  std::mt19937 rng(19);
  Mat2 h = oracle::random_matrix<2>(rng, 1.0);
  CHECK((Tensor42::identity().apply(h) - h).cwiseAbs().maxCoeff() == 0.0);

  Mat2 a, b, c;
  a << 1.0, 2.0, 3.0, 4.0;
  b << 0.0, 1.0, 0.0, 0.0;
  c << 5.0, 6.0, 7.0, 8.0;
  // (B : C) = 6
  Mat2 out = Tensor42::outer(a, b).apply(c);
  CHECK((out - Mat2(6.0 * a)).cwiseAbs().maxCoeff() == 0.0);

  // linearity
  Mat2 h2 = oracle::random_matrix<2>(rng, 1.0);
  Tensor42 t = Tensor42::outer(a, c) + 2.0 * Tensor42::identity();
  Mat2 lhs = t.apply(Mat2(h + 3.0 * h2));
  Mat2 rhs = t.apply(h) + 3.0 * t.apply(h2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * rhs.cwiseAbs().maxCoeff());
}
