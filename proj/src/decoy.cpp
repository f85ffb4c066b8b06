#include "cvmdi/decoy.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <random>

#include "cvmdi/errors.hpp"

namespace cvmdi {

namespace {

// Relative to the identity-scaled pencil; below this is round-off.
constexpr double kPsdSlack = 1e-12;
constexpr double kBisectionTol = 1e-7;

int thermal_cutoff(double nbar) {
  if (nbar <= 0.0) return 0;
  const double ratio = nbar / (1.0 + nbar);
  return static_cast<int>(std::ceil(std::log(kTailTolerance) / std::log(ratio)));
}

}  // namespace

std::string_view to_string(PulseLabel label) {
  switch (label) {
    case PulseLabel::Key:
      return "key";
    case PulseLabel::Decoy:
      return "decoy";
    case PulseLabel::Estimation:
      return "est";
  }
  return "?";
}

MixtureWeights mixture_weights(double p, double p_est) {
  if (!(p >= 0.0 && p <= 1.0) || !(p_est >= 0.0 && p_est <= 1.0)) {
    throw DomainError(fmt::format("mixture_weights: p={} and p_est={} must lie in [0, 1]", p, p_est));
  }
  MixtureWeights w;
  w.estimation = p_est;
  w.decoy = (1.0 - p) * (1.0 - p_est);
  // p(1 - p_est) recomputed as the complement, so (decoy + est) + key == 1 exactly.
  w.key = 1.0 - (w.decoy + w.estimation);
  return w;
}

double decoy_residual_min_eigenvalue(double alpha_sq, double nbar, double p, int cutoff) {
  const Eigen::MatrixXd residual =
      thermal_state(nbar, cutoff) - p * four_state_density(std::sqrt(alpha_sq), cutoff);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(residual, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DecoyFeasibility decoy_feasibility(double alpha_sq, double nbar, int cutoff) {
  if (!(alpha_sq > 0.0) || !std::isfinite(alpha_sq)) throw DomainError("decoy_feasibility: alpha^2 must be > 0");
  if (!(nbar > 0.0) || !std::isfinite(nbar)) throw DomainError("decoy_feasibility: nbar must be > 0");

  DecoyFeasibility out;
  out.cutoff = std::max(resolve_cutoff(alpha_sq, cutoff), thermal_cutoff(nbar));
  const Eigen::MatrixXd tau = thermal_state(nbar, out.cutoff);
  const Eigen::MatrixXd rho = four_state_density(std::sqrt(alpha_sq), out.cutoff);

  // tau - p rho >= 0  <=>  I - p S rho S >= 0 with S = tau^{-1/2}. The scaled
  // pencil keeps tail constraints (entries ~1e-80) visible to the eigensolver.
  const Eigen::VectorXd s = tau.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd scaled = s.asDiagonal() * rho * s.asDiagonal();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(scaled.rows(), scaled.cols());
  const auto feasible = [&](double p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(identity - p * scaled, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff() >= -kPsdSlack;
  };

  double lo = 0.0;
  double hi = 1.0;
  if (feasible(hi)) {
    lo = hi;
  } else {
    while (hi - lo > kBisectionTol) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? lo : hi) = mid;
      ++out.iterations;
    }
  }
  out.p_max = lo;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> residual(tau - lo * rho, Eigen::EigenvaluesOnly);
  out.residual_min_eigenvalue = residual.eigenvalues().minCoeff();
  return out;
}

std::vector<PulseLabel> sample_labels(const DecoyPlan& plan, std::size_t n) {
  const MixtureWeights w = mixture_weights(plan.p, plan.p_est);
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<PulseLabel> labels(n);
  for (auto& label : labels) {
    const double u = uniform(rng);
    if (u < w.key) {
      label = PulseLabel::Key;
    } else if (u < w.key + w.decoy) {
      label = PulseLabel::Decoy;
    } else {
      label = PulseLabel::Estimation;
    }
  }
  return labels;
}

void write_labels_binary(std::ostream& out, const std::vector<PulseLabel>& labels) {
  out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

void write_labels_csv(std::ostream& out, const std::vector<PulseLabel>& labels) {
  out << "label\n";
  for (const auto label : labels) out << to_string(label) << '\n';
}

}  // namespace cvmdi
