#pragma once

// Reduction of the two-link relay configuration to an equivalent one-way
// Gaussian channel. Noises are in shot-noise units referred to the input.

#include <cmath>

#include "cvmdi/errors.hpp"

namespace cvmdi {

inline constexpr double kDefaultLossDbPerKm = 0.2;

template <typename Scalar>
Scalar transmittance_from_distance(Scalar length_km, Scalar loss_db_per_km = Scalar(kDefaultLossDbPerKm)) {
  using std::pow;
  if (!std::isfinite(static_cast<double>(length_km)) || length_km < Scalar(0)) {
    throw DomainError("transmittance_from_distance: length must be finite and >= 0");
  }
  if (!std::isfinite(static_cast<double>(loss_db_per_km)) || loss_db_per_km <= Scalar(0)) {
    throw DomainError("transmittance_from_distance: loss must be finite and > 0");
  }
  return pow(Scalar(10), -loss_db_per_km * length_km / Scalar(10));
}

/// Alice->Charlie and Bob->Charlie links.
template <typename Scalar = double>
struct LinkBudget {
  Scalar l_ac = 0;  // km
  Scalar l_bc = 0;  // km
  Scalar loss_db_per_km = Scalar(kDefaultLossDbPerKm);
  Scalar eps_a = 0;
  Scalar eps_b = 0;

  Scalar eta_a() const { return transmittance_from_distance(l_ac, loss_db_per_km); }
  Scalar eta_b() const { return transmittance_from_distance(l_bc, loss_db_per_km); }
  /// Transmittance of the whole Alice-to-Bob line.
  Scalar eta_total() const { return transmittance_from_distance(l_ac + l_bc, loss_db_per_km); }
};

/// Charlie's homodyne detectors.
template <typename Scalar = double>
struct DetectorModel {
  Scalar eta_hom = 1;
  Scalar v_el = 0;

  static DetectorModel ideal() { return {}; }
  bool is_ideal() const { return eta_hom == Scalar(1) && v_el == Scalar(0); }

  /// Detection-added noise chi_hom = [v_el + (1 - eta_hom)] / eta_hom.
  Scalar added_noise() const {
    if (!(eta_hom > Scalar(0)) || eta_hom > Scalar(1)) {
      throw DomainError("detector efficiency must lie in (0, 1]");
    }
    if (v_el < Scalar(0)) throw DomainError("electronic noise must be >= 0");
    return (v_el + (Scalar(1) - eta_hom)) / eta_hom;
  }
};

template <typename Scalar = double>
struct EquivalentChannel {
  Scalar gain_sq = 0;      // g^2 of Bob's displacement
  Scalar eta = 0;          // eta_A g^2 / 2
  Scalar eps = 0;          // equivalent excess noise
  Scalar chi_t = 0;        // 1/eta - 1 + eps
  Scalar chi_hom = 0;      // detector-added noise
  Scalar chi_t_prime = 0;  // chi_t + 2 chi_hom / eta_A
};

using LinkBudgetd = LinkBudget<double>;
using DetectorModeld = DetectorModel<double>;
using EquivalentChanneld = EquivalentChannel<double>;

/// chi = 1/eta - 1 + eps, the noise of a single link referred to its input.
template <typename Scalar>
Scalar line_noise(Scalar eta, Scalar eps) {
  if (!(eta > Scalar(0)) || eta > Scalar(1)) throw DomainError("line_noise: eta must lie in (0, 1]");
  return Scalar(1) / eta - Scalar(1) + eps;
}

/// Displacement gain g^2 = 2(V_B - 1) / (eta_B (V_B + 1)), which cancels the
/// mismatch term of the equivalent excess noise.
template <typename Scalar>
Scalar optimal_gain(Scalar v_b, Scalar eta_b) {
  if (!(v_b > Scalar(1))) throw DomainError("optimal_gain: V_B must exceed 1 (zero modulation)");
  if (!(eta_b > Scalar(0)) || eta_b > Scalar(1)) throw DomainError("optimal_gain: eta_B must lie in (0, 1]");
  return Scalar(2) * (v_b - Scalar(1)) / (eta_b * (v_b + Scalar(1)));
}

/// Equivalent excess noise for an arbitrary gain,
///
///   eps = 1 + chi_A + (eta_B/eta_A)(chi_B - 1)
///           + (eta_B/eta_A)(sqrt(2/(eta_B g^2)) sqrt(V_B - 1) - sqrt(V_B + 1))^2.
template <typename Scalar>
Scalar equivalent_excess_noise(const LinkBudget<Scalar>& link, Scalar gain_sq, Scalar v_b) {
  using std::sqrt;
  if (!(gain_sq > Scalar(0))) throw DomainError("equivalent_excess_noise: g^2 must be > 0");
  if (v_b < Scalar(1)) throw DomainError("equivalent_excess_noise: V_B must be >= 1");
  const Scalar eta_a = link.eta_a();
  const Scalar eta_b = link.eta_b();
  if (!(eta_a > Scalar(0)) || !(eta_b > Scalar(0))) {
    throw DomainError("equivalent_excess_noise: transmittance underflowed to zero");
  }
  const Scalar ratio = eta_b / eta_a;
  const Scalar mismatch = sqrt(Scalar(2) / (eta_b * gain_sq)) * sqrt(v_b - Scalar(1)) - sqrt(v_b + Scalar(1));
  return Scalar(1) + line_noise(eta_a, link.eps_a) + ratio * (line_noise(eta_b, link.eps_b) - Scalar(1)) +
         ratio * mismatch * mismatch;
}

/// Closed form at the optimal gain: eps = (eta_B/eta_A)(eps_B - 2) + eps_A + 2/eta_A.
template <typename Scalar>
Scalar equivalent_excess_noise_optimal(const LinkBudget<Scalar>& link) {
  const Scalar eta_a = link.eta_a();
  const Scalar eta_b = link.eta_b();
  if (!(eta_a > Scalar(0))) throw DomainError("equivalent_excess_noise: transmittance underflowed to zero");
  return (eta_b / eta_a) * (link.eps_b - Scalar(2)) + link.eps_a + Scalar(2) / eta_a;
}

template <typename Scalar>
EquivalentChannel<Scalar> equivalent_channel(const LinkBudget<Scalar>& link, Scalar v_b,
                                             const DetectorModel<Scalar>& det = {}) {
  const Scalar eta_a = link.eta_a();
  EquivalentChannel<Scalar> ch;
  ch.gain_sq = optimal_gain(v_b, link.eta_b());
  ch.eta = eta_a * ch.gain_sq / Scalar(2);
  ch.eps = equivalent_excess_noise_optimal(link);
  ch.chi_t = Scalar(1) / ch.eta - Scalar(1) + ch.eps;
  ch.chi_hom = det.added_noise();
  ch.chi_t_prime = ch.chi_t + Scalar(2) * ch.chi_hom / eta_a;
  return ch;
}

}  // namespace cvmdi
