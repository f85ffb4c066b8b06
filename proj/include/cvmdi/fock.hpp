#pragma once

// Truncated Fock-space constructions of the four-state source. These are the
// brute-force counterparts of the closed forms in modulation.hpp.

#include <Eigen/Dense>
#include <complex>

#include "cvmdi/modulation.hpp"

namespace cvmdi {

/// Default photon-number cutoff; escalated automatically when the tail demands it.
inline constexpr int kDefaultCutoff = 40;
/// Maximum Poisson weight allowed beyond the cutoff.
inline constexpr double kTailTolerance = 1e-12;

struct FockVector {
  Eigen::VectorXcd amplitudes;  // index n = photon number, 0..cutoff

  int cutoff() const { return static_cast<int>(amplitudes.size()) - 1; }
  double norm() const { return amplitudes.norm(); }
};

/// Poisson weight of photon numbers above `cutoff` for mean photon number `mean`.
double poisson_tail(double mean, int cutoff);

/// Smallest cutoff (>= 4) whose Poisson tail is below `tol`.
int required_cutoff(double mean_photons, double tol = kTailTolerance);

/// max(requested, required_cutoff(mean_photons)).
int resolve_cutoff(double mean_photons, int requested = kDefaultCutoff);

/// Throws TruncationError (carrying the required cutoff) if `cutoff` is too small.
void check_cutoff(double mean_photons, int cutoff);

/// Truncated annihilation operator, a|n> = sqrt(n)|n-1>.
Eigen::MatrixXd annihilation(int cutoff);

/// Normalized coherent state |gamma>, truncated at `cutoff`.
FockVector coherent_state(std::complex<double> gamma, int cutoff);

/// Schmidt vector |phi_k>: support on n = k (mod 4) with coefficients
/// (-1)^j alpha^{4j+k} / sqrt((4j+k)!), normalized.
FockVector fock_phi_state(int k, double alpha, int cutoff);

/// Non-Gaussian state |psi_k> = 1/2 sum_m exp(-i (1+2k) m pi/4) |phi_m>.
///
/// With this phase the purification satisfies
/// sum_k sqrt(lambda_k)|phi_k>|phi_k> = 1/2 sum_k |psi_k>|alpha_k>.
FockVector fock_psi_state(int k, double alpha, int cutoff);

/// Coefficient matrix C of the two-mode source |Psi_4> = sum_{mn} C_mn |m>|n>
/// in Schmidt form, with weights taken from the truncated Poisson classes.
Eigen::MatrixXd four_state_purification(double alpha, int cutoff);

/// (X, Y, Z) = (1 + 2<n_1>, 1 + 2<n_2>, <a1 a2 + a1^dag a2^dag>) evaluated on
/// the truncated purification with explicit ladder matrices.
SourceCMd fock_source_oracle(double alpha, int cutoff);

/// rho_4 = sum_k lambda_k |phi_k><phi_k|. Real symmetric in the Fock basis.
Eigen::MatrixXd four_state_density(double alpha, int cutoff);

/// Thermal state of mean photon number `nbar`, renormalized after truncation.
Eigen::MatrixXd thermal_state(double nbar, int cutoff);

}  // namespace cvmdi
