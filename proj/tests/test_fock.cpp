#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "cvmdi/errors.hpp"
#include "cvmdi/fock.hpp"
#include "cvmdi/modulation.hpp"

using namespace cvmdi;

namespace {

std::complex<double> constellation(double alpha, int k) {
  return std::polar(alpha, (1.0 + 2.0 * k) * std::numbers::pi / 4.0);
}

}  // namespace

TEST_CASE("phi states are orthonormal") {
  const double alpha = std::sqrt(0.5);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      const auto overlap = fock_phi_state(j, alpha, 40).amplitudes.dot(fock_phi_state(k, alpha, 40).amplitudes);
      CHECK(std::abs(overlap - (j == k ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("phi states: support and small-amplitude limit") {
  const auto phi = fock_phi_state(2, 0.7, 40);
  for (int n = 0; n <= 40; ++n) {
    if (n % 4 != 2) CHECK(phi.amplitudes(n) == std::complex<double>(0.0));
  }
  // alternating signs within the class
  CHECK(phi.amplitudes(2).real() > 0.0);
  CHECK(phi.amplitudes(6).real() < 0.0);

  const auto vac = fock_phi_state(0, 1e-4, 40);
  CHECK(std::abs(vac.amplitudes(0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Schmidt mixture reproduces the Poisson photon distribution") {
  const double a2 = 0.5;
  const auto lambda = lambda_weights(a2);
  std::array<Eigen::VectorXcd, 4> phi;
  for (int k = 0; k < 4; ++k) phi[k] = fock_phi_state(k, std::sqrt(a2), 40).amplitudes;
  for (int n = 0; n <= 40; ++n) {
    double p = 0.0;
    for (int k = 0; k < 4; ++k) p += lambda(k) * std::norm(phi[k](n));
    const double poisson = std::exp(-a2 + n * std::log(a2) - std::lgamma(n + 1.0));
    CHECK(std::abs(p - poisson) < 1e-8);
  }
}

TEST_CASE("four-state density") {
  const double alpha = std::sqrt(0.5);
  const Eigen::MatrixXd rho = four_state_density(alpha, 40);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-10);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
  const Eigen::VectorXd ev = es.eigenvalues().reverse();
  const auto lambda = lambda_weights(0.5);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(ev(k) - lambda(k)) < 1e-8);
  CHECK(ev.tail(ev.size() - 4).cwiseAbs().maxCoeff() < 1e-8);

  Eigen::MatrixXcd mix = Eigen::MatrixXcd::Zero(41, 41);
  for (int k = 0; k < 4; ++k) {
    const auto v = coherent_state(constellation(alpha, k), 40).amplitudes;
    mix += 0.25 * v * v.adjoint();
  }
  const Eigen::MatrixXcd diff = mix - rho.cast<std::complex<double>>();
  CHECK(diff.operatorNorm() < 1e-8);
}

TEST_CASE("psi states relate the Schmidt form to the coherent form") {
  // sum_k sqrt(l_k)|phi_k>|phi_k>  ==  1/2 sum_k |psi_k>|alpha_k>
  const double alpha = std::sqrt(0.5);
  const int cutoff = 40;
  const Eigen::MatrixXd schmidt = four_state_purification(alpha, cutoff);
  Eigen::MatrixXcd coherent = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int k = 0; k < 4; ++k) {
    const auto psi = fock_psi_state(k, alpha, cutoff).amplitudes;
    const auto ak = coherent_state(constellation(alpha, k), cutoff).amplitudes;
    coherent += 0.5 * psi * ak.transpose();
  }
  CHECK((coherent - schmidt.cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-8);

  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      const auto overlap =
          fock_psi_state(j, alpha, cutoff).amplitudes.dot(fock_psi_state(k, alpha, cutoff).amplitudes);
      CHECK(std::abs(overlap - (j == k ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("Fock oracle matches the closed forms") {
  for (double a2 : {0.05, 0.2, 0.5, 1.0}) {
    CAPTURE(a2);
    const auto closed = source_covariance(ModulationSchemed::four_state(a2));
    for (int cutoff : {40, 60}) {
      const auto oracle = fock_source_oracle(std::sqrt(a2), cutoff);
      CHECK(std::abs(oracle.x_var - closed.x_var) < 1e-8);
      CHECK(std::abs(oracle.y_var - closed.y_var) < 1e-8);
      CHECK(std::abs(oracle.z_corr - closed.z_corr) < 1e-8);
    }
  }
  const auto tiny = fock_source_oracle(1e-6, 40);
  CHECK(tiny.x_var == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tiny.z_corr == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("truncation errors carry the required cutoff") {
  CHECK_THROWS_AS(fock_phi_state(0, 0.5, 3), TruncationError);
  try {
    fock_source_oracle(std::sqrt(10.0), 20);
    FAIL("expected a truncation error");
  } catch (const TruncationError& e) {
    CHECK(e.required_cutoff() > 20);
    CHECK_NOTHROW(fock_source_oracle(std::sqrt(10.0), e.required_cutoff()));
  }
  CHECK_THROWS_AS(thermal_state(5.0, 10), TruncationError);
  CHECK_THROWS_AS(fock_phi_state(4, 0.5, 40), DomainError);
}

TEST_CASE("thermal state") {
  const Eigen::MatrixXd tau = thermal_state(0.3, 60);
  CHECK(std::abs(tau.trace() - 1.0) < 1e-12);
  const Eigen::VectorXd n = Eigen::VectorXd::LinSpaced(61, 0, 60);
  CHECK(tau.diagonal().dot(n) == doctest::Approx(0.3).epsilon(1e-10));
}
