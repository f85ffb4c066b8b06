#pragma once

// Joint covariance matrix after the relay measurement and displacement, and
// the reverse-reconciliation key rate K = beta I_AB - chi_BE built from it.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "cvmdi/channel.hpp"
#include "cvmdi/errors.hpp"
#include "cvmdi/modulation.hpp"
#include "cvmdi/symplectic.hpp"

namespace cvmdi {

inline constexpr double kPhysicalSlack = 1e-9;

/// Covariance of (A1, B'1) in standard form: a I, b I on the diagonal, c Z off it.
template <typename Scalar = double>
struct JointCM {
  Scalar a = 1;
  Scalar b = 1;
  Scalar c = 0;

  Eigen::Matrix<Scalar, 4, 4> matrix() const { return standard_form_matrix(a, b, c); }
};

template <typename Scalar = double>
struct KeyRateReport {
  JointCM<Scalar> cm;
  EquivalentChannel<Scalar> channel;
  Scalar i_ab = 0;
  std::array<Scalar, 3> kappa{1, 1, 1};
  Scalar chi_be = 0;
  Scalar beta = 0;
  Scalar key_rate = 0;
  Scalar plob = 0;  // +inf for a zero-length line
};

using JointCMd = JointCM<double>;
using KeyRateReportd = KeyRateReport<double>;

template <typename Scalar>
std::pair<Scalar, Scalar> symplectic_pair(const JointCM<Scalar>& cm) {
  return standard_form_symplectic(cm.a, cm.b, cm.c);
}

/// kappa_3 = a - c^2/(b+1): Alice's mode conditioned on Bob's heterodyne outcome.
template <typename Scalar>
Scalar conditional_eigenvalue(const JointCM<Scalar>& cm) {
  const Scalar k3 = cm.a - cm.c * cm.c / (cm.b + Scalar(1));
  if (k3 < Scalar(1) - Scalar(kPhysicalSlack)) {
    throw ModelError("conditional eigenvalue below 1: covariance matrix is unphysical");
  }
  return k3;
}

template <typename Scalar>
void require_physical(const JointCM<Scalar>& cm) {
  const Scalar floor = Scalar(1) - Scalar(kPhysicalSlack);
  if (!(cm.a >= floor) || !(cm.b >= floor)) {
    throw ModelError("joint covariance has a mode variance below the vacuum level");
  }
  const auto [k1, k2] = symplectic_pair(cm);
  if (k2 < floor || k1 < floor) {
    throw ModelError("joint covariance violates the uncertainty principle");
  }
}

/// (a, b, c) = (X, eta (Y + chi), sqrt(eta) Z), chi = chi_t or chi_t' per flag.
template <typename Scalar>
JointCM<Scalar> assemble_joint_cm(const SourceCM<Scalar>& source, const EquivalentChannel<Scalar>& chan,
                                  bool use_detector_noise = true) {
  using std::sqrt;
  const Scalar chi = use_detector_noise ? chan.chi_t_prime : chan.chi_t;
  JointCM<Scalar> cm{source.x_var, chan.eta * (source.y_var + chi), sqrt(chan.eta) * source.z_corr};
  require_physical(cm);
  return cm;
}

/// I_AB = log2[(a+1) / (a+1 - c^2/(b+1))].
template <typename Scalar>
Scalar mutual_information(const JointCM<Scalar>& cm) {
  using std::log2;
  using std::log1p;
  const Scalar ap1 = cm.a + Scalar(1);
  const Scalar shrink = cm.c * cm.c / (cm.b + Scalar(1));
  if (!(shrink < ap1)) throw ModelError("mutual_information: c^2 >= (a+1)(b+1)");
  // log2(ap1/(ap1 - s)) = -log1p(-s/ap1)/ln 2, exact for small s.
  return -log1p(-shrink / ap1) / Scalar(std::numbers::ln2);
}

/// Two-quadrature heterodyne form 2 * 1/2 log2(V_AM / V_AM|BM) with
/// V_AM = (a+1)/2, V_BM = (b+1)/2, V_AM|BM = V_AM - c^2/(4 V_BM).
template <typename Scalar>
Scalar mutual_information_heterodyne(const JointCM<Scalar>& cm) {
  using std::log2;
  const Scalar v_am = (cm.a + Scalar(1)) / Scalar(2);
  const Scalar v_bm = (cm.b + Scalar(1)) / Scalar(2);
  const Scalar v_cond = v_am - cm.c * cm.c / (Scalar(4) * v_bm);
  if (!(v_cond > Scalar(0))) throw ModelError("mutual_information: conditional variance <= 0");
  return Scalar(2) * Scalar(0.5) * log2(v_am / v_cond);
}

/// G(x) = (x+1) log2(x+1) - x log2 x, written as log2(1+x) + x log2(1 + 1/x).
template <typename Scalar>
Scalar entropy_g(Scalar x) {
  using std::log1p;
  if (x < Scalar(0)) {
    if (x < Scalar(-1e-12)) throw DomainError("entropy_g: argument must be >= 0");
    x = Scalar(0);
  }
  if (x == Scalar(0)) return Scalar(0);
  return (log1p(x) + x * log1p(Scalar(1) / x)) / Scalar(std::numbers::ln2);
}

/// chi_BE = G[(k1-1)/2] + G[(k2-1)/2] - G[(k3-1)/2].
template <typename Scalar>
Scalar holevo_bound(const JointCM<Scalar>& cm) {
  const auto [k1, k2] = symplectic_pair(cm);
  const Scalar k3 = conditional_eigenvalue(cm);
  const auto g = [](Scalar k) { return entropy_g((k - Scalar(1)) / Scalar(2)); };
  return g(k1) + g(k2) - g(k3);
}

/// Repeaterless secret-key capacity -log2(1 - eta).
template <typename Scalar>
Scalar plob_bound(Scalar eta) {
  using std::log1p;
  if (!(eta > Scalar(0))) throw DomainError("plob_bound: transmittance must be > 0");
  if (!(eta < Scalar(1))) throw DomainError("plob_bound: capacity is infinite for transmittance >= 1");
  return -log1p(-eta) / Scalar(std::numbers::ln2);
}

template <typename Scalar>
KeyRateReport<Scalar> secret_key_rate(const ModulationScheme<Scalar>& scheme, const LinkBudget<Scalar>& link,
                                      const DetectorModel<Scalar>& det, Scalar beta) {
  if (!(beta >= Scalar(0)) || beta > Scalar(1)) {
    throw DomainError("reconciliation efficiency must lie in [0, 1]");
  }
  if (!(scheme.v_mod > Scalar(0))) throw DomainError("modulation variance must be > 0");

  KeyRateReport<Scalar> r;
  const SourceCM<Scalar> source = source_covariance(scheme);
  r.channel = equivalent_channel(link, source.y_var, det);
  r.cm = assemble_joint_cm(source, r.channel, true);
  r.i_ab = mutual_information(r.cm);
  const auto [k1, k2] = symplectic_pair(r.cm);
  r.kappa = {k1, k2, conditional_eigenvalue(r.cm)};
  r.chi_be = holevo_bound(r.cm);
  r.beta = beta;
  r.key_rate = beta * r.i_ab - r.chi_be;
  const Scalar eta_line = link.eta_total();
  r.plob = eta_line < Scalar(1) ? plob_bound(eta_line) : std::numeric_limits<Scalar>::infinity();
  return r;
}

/// Symplectic spectrum (ascending) of any two-mode covariance matrix from the
/// moduli of the eigenvalues of i Omega gamma. Independent of the standard-form
/// formula used by symplectic_pair.
template <typename Derived>
std::pair<typename Derived::Scalar, typename Derived::Scalar> generic_symplectic_oracle(
    const Eigen::MatrixBase<Derived>& gamma) {
  using Scalar = typename Derived::Scalar;
  using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
  if (gamma.rows() != 4 || gamma.cols() != 4) throw DomainError("generic_symplectic_oracle: need a 4x4 matrix");
  const Mat4 g = gamma;
  using std::abs;
  if (!((g - g.transpose()).cwiseAbs().maxCoeff() <= Scalar(1e-12) * (Scalar(1) + g.cwiseAbs().maxCoeff()))) {
    throw DomainError("generic_symplectic_oracle: matrix is not symmetric");
  }
  Mat4 omega = Mat4::Zero();
  omega(0, 1) = omega(2, 3) = Scalar(1);
  omega(1, 0) = omega(3, 2) = Scalar(-1);
  // Omega gamma has eigenvalues +-i nu_k.
  Eigen::EigenSolver<Mat4> solver(omega * g, false);
  std::array<Scalar, 4> mod;
  for (int i = 0; i < 4; ++i) mod[i] = abs(solver.eigenvalues()(i).imag());
  std::sort(mod.begin(), mod.end());
  return {(mod[0] + mod[1]) / Scalar(2), (mod[2] + mod[3]) / Scalar(2)};
}

}  // namespace cvmdi
