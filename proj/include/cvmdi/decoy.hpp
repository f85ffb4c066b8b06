#pragma once

// Decoy-state mixing: key states (the four-state mixture) and decoy states
// combine into a Gaussian (thermal) average state; a fraction of all pulses
// is set aside for parameter estimation.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "cvmdi/fock.hpp"

namespace cvmdi {

enum class PulseLabel : std::uint8_t { Key = 0, Decoy = 1, Estimation = 2 };

std::string_view to_string(PulseLabel label);

struct MixtureWeights {
  double key = 1;
  double decoy = 0;
  double estimation = 0;
};

struct DecoyPlan {
  double p = 1;      // key-state weight
  double p_est = 0;  // estimation fraction
  double alpha_sq = 0.2;
  double nbar = 0.2;  // mean photon number of the Gaussian reference state
  std::uint64_t seed = 0;
};

/// (p(1-p_est), (1-p)(1-p_est), p_est); key is the complement, so
/// (decoy + estimation) + key == 1 exactly.
MixtureWeights mixture_weights(double p, double p_est);

/// Minimum eigenvalue of tau(nbar) - p rho_4(alpha) in the truncated Fock space.
double decoy_residual_min_eigenvalue(double alpha_sq, double nbar, double p, int cutoff);

struct DecoyFeasibility {
  double p_max = 0;
  double residual_min_eigenvalue = 0;  // at p_max
  int cutoff = 0;                      // after escalation
  int iterations = 0;
  bool feasible() const { return p_max > 0; }
};

/// Largest key weight p in [0, 1] for which tau(nbar) - p rho_4 stays positive
/// semidefinite, by bisection on the minimum eigenvalue to 1e-6 in p.
DecoyFeasibility decoy_feasibility(double alpha_sq, double nbar, int cutoff = kDefaultCutoff);

/// Reproducible label stream: key/decoy/estimation drawn with mixture_weights.
std::vector<PulseLabel> sample_labels(const DecoyPlan& plan, std::size_t n);

/// One byte per label (0 key, 1 decoy, 2 estimation).
void write_labels_binary(std::ostream& out, const std::vector<PulseLabel>& labels);
/// Single CSV column "label" with values key/decoy/est.
void write_labels_csv(std::ostream& out, const std::vector<PulseLabel>& labels);

}  // namespace cvmdi
