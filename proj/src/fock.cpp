#include "cvmdi/fock.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace cvmdi {

namespace {

void require_positive_alpha(double alpha, const char* who) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw DomainError(fmt::format("{}: amplitude alpha must be finite and > 0 (got {})", who, alpha));
  }
}

void require_min_cutoff(int cutoff, const char* who) {
  if (cutoff < 4) {
    throw TruncationError(fmt::format("{}: cutoff {} is below the minimum of 4", who, cutoff), 4);
  }
}

}  // namespace

double poisson_tail(double mean, int cutoff) {
  if (mean <= 0.0) return 0.0;
  const double log_mean = std::log(mean);
  double tail = 0.0;
  for (int n = cutoff + 1;; ++n) {
    const double term = std::exp(-mean + n * log_mean - std::lgamma(n + 1.0));
    tail += term;
    // Past the mode the terms fall geometrically with ratio mean/n.
    if (n > mean && (term < 1e-17 * tail || term == 0.0)) break;
    if (n > cutoff + 100000) break;
  }
  return tail;
}

int required_cutoff(double mean_photons, double tol) {
  int cutoff = 4;
  while (poisson_tail(mean_photons, cutoff) >= tol) ++cutoff;
  return cutoff;
}

int resolve_cutoff(double mean_photons, int requested) {
  return std::max(requested, required_cutoff(mean_photons));
}

void check_cutoff(double mean_photons, int cutoff) {
  if (poisson_tail(mean_photons, cutoff) >= kTailTolerance) {
    const int need = required_cutoff(mean_photons);
    throw TruncationError(
        fmt::format("cutoff {} leaves Poisson tail above {:g} for mean photon number {}; need >= {}",
                    cutoff, kTailTolerance, mean_photons, need),
        need);
  }
}

Eigen::MatrixXd annihilation(int cutoff) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

FockVector coherent_state(std::complex<double> gamma, int cutoff) {
  if (cutoff < 0) throw DomainError("coherent_state: cutoff must be >= 0");
  Eigen::VectorXcd v(cutoff + 1);
  v(0) = 1.0;
  for (int n = 1; n <= cutoff; ++n) v(n) = v(n - 1) * gamma / std::sqrt(static_cast<double>(n));
  v.normalize();
  return {std::move(v)};
}

FockVector fock_phi_state(int k, double alpha, int cutoff) {
  if (k < 0 || k > 3) throw DomainError("fock_phi_state: k must be in 0..3");
  require_positive_alpha(alpha, "fock_phi_state");
  require_min_cutoff(cutoff, "fock_phi_state");
  check_cutoff(alpha * alpha, cutoff);

  // Work in log space: alpha^m / sqrt(m!) over- or underflows for large m.
  const double log_alpha = std::log(alpha);
  double log_max = -std::numeric_limits<double>::infinity();
  for (int m = k; m <= cutoff; m += 4) {
    log_max = std::max(log_max, m * log_alpha - 0.5 * std::lgamma(m + 1.0));
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cutoff + 1);
  for (int m = k, j = 0; m <= cutoff; m += 4, ++j) {
    const double mag = std::exp(m * log_alpha - 0.5 * std::lgamma(m + 1.0) - log_max);
    v(m) = (j % 2 == 0) ? mag : -mag;
  }
  v.normalize();
  return {std::move(v)};
}

FockVector fock_psi_state(int k, double alpha, int cutoff) {
  if (k < 0 || k > 3) throw DomainError("fock_psi_state: k must be in 0..3");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cutoff + 1);
  for (int m = 0; m < 4; ++m) {
    const double phase = -(1.0 + 2.0 * k) * m * std::numbers::pi / 4.0;
    v += 0.5 * std::polar(1.0, phase) * fock_phi_state(m, alpha, cutoff).amplitudes;
  }
  return {std::move(v)};
}

Eigen::MatrixXd four_state_purification(double alpha, int cutoff) {
  require_positive_alpha(alpha, "four_state_purification");
  require_min_cutoff(cutoff, "four_state_purification");
  check_cutoff(alpha * alpha, cutoff);

  // Schmidt weights straight from the truncated Poisson distribution, so this
  // construction never touches the closed-form lambda_k.
  Eigen::Vector4d weight = Eigen::Vector4d::Zero();
  const double a2 = alpha * alpha;
  for (int n = 0; n <= cutoff; ++n) {
    weight(n % 4) += std::exp(-a2 + n * std::log(a2) - std::lgamma(n + 1.0));
  }
  weight /= weight.sum();

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (int k = 0; k < 4; ++k) {
    if (weight(k) == 0.0) continue;
    const Eigen::VectorXd phi = fock_phi_state(k, alpha, cutoff).amplitudes.real();
    c += std::sqrt(weight(k)) * phi * phi.transpose();
  }
  return c;
}

SourceCMd fock_source_oracle(double alpha, int cutoff) {
  const Eigen::MatrixXd c = four_state_purification(alpha, cutoff);
  const Eigen::MatrixXd a = annihilation(cutoff);
  const Eigen::MatrixXd number = a.transpose() * a;

  // |Psi> = sum C_mn |m>|n>:  (O1 x O2)|Psi>  <->  O1 C O2^T.
  const double n1 = (c.transpose() * number * c).trace();
  const double n2 = (c * number * c.transpose()).trace();
  const double a1a2 = c.cwiseProduct(a * c * a.transpose()).sum();
  // <a1^dag a2^dag> is the complex conjugate of <a1 a2>; C is real.
  return {1.0 + 2.0 * n1, 1.0 + 2.0 * n2, 2.0 * a1a2};
}

Eigen::MatrixXd four_state_density(double alpha, int cutoff) {
  require_positive_alpha(alpha, "four_state_density");
  const SchmidtWeightsd lambda = lambda_weights(alpha * alpha);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (int k = 0; k < 4; ++k) {
    const Eigen::VectorXd phi = fock_phi_state(k, alpha, cutoff).amplitudes.real();
    rho.noalias() += lambda(k) * phi * phi.transpose();
  }
  return rho;
}

Eigen::MatrixXd thermal_state(double nbar, int cutoff) {
  if (!std::isfinite(nbar) || nbar < 0.0) throw DomainError("thermal_state: nbar must be >= 0");
  if (cutoff < 0) throw DomainError("thermal_state: cutoff must be >= 0");
  const double ratio = nbar / (1.0 + nbar);
  if (std::pow(ratio, cutoff + 1) >= kTailTolerance) {
    const int need = static_cast<int>(std::ceil(std::log(kTailTolerance) / std::log(ratio)));
    throw TruncationError(fmt::format("thermal_state: cutoff {} too small for nbar {}; need >= {}",
                                      cutoff, nbar, need),
                          need);
  }
  Eigen::VectorXd diag(cutoff + 1);
  double p = 1.0 / (1.0 + nbar);
  for (int n = 0; n <= cutoff; ++n, p *= ratio) diag(n) = p;
  diag /= diag.sum();
  return diag.asDiagonal();
}

}  // namespace cvmdi
