#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "cvmdi/errors.hpp"

namespace cvmdi {

/// Two-mode covariance matrix in standard form
///
///     [ a I   c Z ]
///     [ c Z   b I ]      Z = diag(1, -1)
///
/// ordered as (x1, p1, x2, p2).
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> standard_form_matrix(Scalar a, Scalar b, Scalar c) {
  Eigen::Matrix<Scalar, 4, 4> m = Eigen::Matrix<Scalar, 4, 4>::Zero();
  m(0, 0) = m(1, 1) = a;
  m(2, 2) = m(3, 3) = b;
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return m;
}

/// Tolerance below which a negative discriminant is treated as round-off.
inline constexpr double kDiscriminantSlack = 1e-9;

/// Symplectic eigenvalues (nu_1 >= nu_2) of the standard-form matrix above.
///
/// Uses A = a^2 + b^2 - 2c^2, B = ab - c^2, nu^2 = (A +- sqrt(A^2 - 4B^2)) / 2.
template <typename Scalar>
std::pair<Scalar, Scalar> standard_form_symplectic(Scalar a, Scalar b, Scalar c) {
  using std::abs;
  using std::sqrt;
  const Scalar big_a = a * a + b * b - Scalar(2) * c * c;
  const Scalar big_b = a * b - c * c;
  Scalar disc = big_a * big_a - Scalar(4) * big_b * big_b;
  if (disc < Scalar(0)) {
    if (disc < -Scalar(kDiscriminantSlack)) {
      throw ModelError("symplectic discriminant is negative: covariance matrix is unphysical");
    }
    disc = Scalar(0);
  }
  const Scalar root = sqrt(disc);
  const Scalar nu1_sq = (big_a + root) / Scalar(2);
  // nu1^2 * nu2^2 = B^2; this form avoids cancellation when nu2 -> 1.
  Scalar nu2_sq = nu1_sq > Scalar(0) ? big_b * big_b / nu1_sq : Scalar(0);
  if (nu1_sq < Scalar(0)) {
    throw ModelError("symplectic spectrum is negative: covariance matrix is unphysical");
  }
  return {sqrt(nu1_sq), sqrt(nu2_sq)};
}

}  // namespace cvmdi
