#pragma once

// Source models for the four-state (discrete) and Gaussian modulations.
//
// All variances are in shot-noise units with x = a + a^dag, p = i(a^dag - a),
// so the vacuum has unit quadrature variance and a coherent state |gamma>
// has mean (2 Re gamma, 2 Im gamma).

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "cvmdi/errors.hpp"
#include "cvmdi/symplectic.hpp"

namespace cvmdi {

enum class ModulationKind { FourState, Gaussian };

inline std::string to_string(ModulationKind kind) {
  return kind == ModulationKind::FourState ? "four-state" : "gaussian";
}

template <typename Scalar = double>
struct ModulationScheme {
  ModulationKind kind = ModulationKind::Gaussian;
  Scalar alpha_sq = 0;  // four-state amplitude |alpha|^2
  Scalar v_mod = 0;     // modulation variance V_M

  static ModulationScheme four_state(Scalar alpha_sq) {
    if (!std::isfinite(static_cast<double>(alpha_sq)) || alpha_sq < Scalar(0)) {
      throw DomainError("four-state amplitude alpha^2 must be finite and >= 0");
    }
    return {ModulationKind::FourState, alpha_sq, Scalar(2) * alpha_sq};
  }

  /// Four-state scheme parameterized by its modulation variance V_M = 2 alpha^2.
  static ModulationScheme four_state_vmod(Scalar v_mod) { return four_state(v_mod / Scalar(2)); }

  static ModulationScheme gaussian(Scalar v_mod) {
    if (!std::isfinite(static_cast<double>(v_mod)) || v_mod < Scalar(0)) {
      throw DomainError("Gaussian modulation variance must be finite and >= 0");
    }
    return {ModulationKind::Gaussian, v_mod / Scalar(2), v_mod};
  }

  /// Quadrature variance of each source mode, V = 1 + V_M.
  Scalar variance() const { return Scalar(1) + v_mod; }
};

/// Schmidt weights (lambda_0 .. lambda_3) of the four-state source.
template <typename Scalar>
using SchmidtWeights = Eigen::Matrix<Scalar, 4, 1>;

/// Covariance triple (X, Y, Z) of a two-mode source in standard form.
template <typename Scalar = double>
struct SourceCM {
  Scalar x_var = 1;
  Scalar y_var = 1;
  Scalar z_corr = 0;

  Eigen::Matrix<Scalar, 4, 4> matrix() const { return standard_form_matrix(x_var, y_var, z_corr); }

  bool is_physical(Scalar tol = Scalar(1e-9)) const {
    if (x_var < Scalar(1) - tol || y_var < Scalar(1) - tol) return false;
    try {
      return standard_form_symplectic(x_var, y_var, z_corr).second >= Scalar(1) - tol;
    } catch (const ModelError&) {
      return false;
    }
  }
};

using ModulationSchemed = ModulationScheme<double>;
using SchmidtWeightsd = SchmidtWeights<double>;
using SourceCMd = SourceCM<double>;

namespace detail {

// lambda_k = e^{-a} sum_n a^{4n+k} / (4n+k)!; every term is positive, so this
// stays accurate where cosh(a) - cos(a) and sinh(a) - sin(a) cancel.
template <typename Scalar>
SchmidtWeights<Scalar> lambda_series(Scalar a) {
  using std::exp;
  SchmidtWeights<Scalar> acc = SchmidtWeights<Scalar>::Zero();
  Scalar term = 1;  // a^m / m!
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int m = 0; m < 10000; ++m) {
    if (m > 0) term *= a / Scalar(m);
    acc(m % 4) += term;
    if (m > 4 && term < eps * acc(0) * Scalar(1e-4)) break;
  }
  return acc * exp(-a);
}

}  // namespace detail

/// Eigenvalues of the four-state average state,
///
///     lambda_{0,2} = e^{-a}/2 [cosh a +- cos a],
///     lambda_{1,3} = e^{-a}/2 [sinh a +- sin a],   a = alpha^2.
template <typename Scalar>
SchmidtWeights<Scalar> lambda_weights(Scalar alpha_sq) {
  using std::cos;
  using std::exp;
  using std::sin;
  if (!std::isfinite(static_cast<double>(alpha_sq)) || alpha_sq < Scalar(0)) {
    throw DomainError("lambda_weights: alpha^2 must be finite and >= 0");
  }
  if (alpha_sq <= Scalar(2)) return detail::lambda_series(alpha_sq);

  const Scalar a = alpha_sq;
  const Scalar decay = exp(Scalar(-2) * a);
  const Scalar ch = (Scalar(1) + decay) / Scalar(2);  // e^{-a} cosh a
  const Scalar sh = (Scalar(1) - decay) / Scalar(2);  // e^{-a} sinh a
  const Scalar ea = exp(-a);
  SchmidtWeights<Scalar> out;
  out << (ch + ea * cos(a)) / Scalar(2), (sh + ea * sin(a)) / Scalar(2),
      (ch - ea * cos(a)) / Scalar(2), (sh - ea * sin(a)) / Scalar(2);
  return out;
}

/// Non-Gaussian correlation Z_4 = 2 alpha^2 sum_k lambda_{k-1}^{3/2} lambda_k^{-1/2},
/// with the index k-1 taken cyclically (lambda_{-1} = lambda_3).
template <typename Scalar>
Scalar four_state_correlation(Scalar alpha_sq) {
  using std::sqrt;
  if (!(alpha_sq > Scalar(0))) {
    throw DomainError("four_state_correlation: alpha^2 must be > 0");
  }
  const SchmidtWeights<Scalar> lambda = lambda_weights(alpha_sq);
  Scalar sum = 0;
  for (int k = 0; k < 4; ++k) {
    const Scalar prev = lambda((k + 3) % 4);
    // lambda_k underflows only for alpha^2 < ~1e-100, where its term is negligible.
    if (lambda(k) > Scalar(0)) sum += prev * sqrt(prev / lambda(k));
  }
  return Scalar(2) * alpha_sq * sum;
}

/// Covariance triple of the source: (1+2a, 1+2a, Z_4) for four states,
/// (V, V, sqrt(V^2-1)) for the Gaussian two-mode squeezed vacuum.
template <typename Scalar>
SourceCM<Scalar> source_covariance(const ModulationScheme<Scalar>& scheme) {
  using std::sqrt;
  const Scalar v = scheme.variance();
  if (scheme.kind == ModulationKind::Gaussian) {
    return {v, v, sqrt(v * v - Scalar(1))};
  }
  if (scheme.alpha_sq == Scalar(0)) return {Scalar(1), Scalar(1), Scalar(0)};
  return {v, v, four_state_correlation(scheme.alpha_sq)};
}

}  // namespace cvmdi
