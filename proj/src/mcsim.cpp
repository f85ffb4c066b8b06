#include "cvmdi/mcsim.hpp"

#include <fmt/format.h>

#include <cmath>
#include <future>
#include <numbers>
#include <ostream>
#include <vector>

#include "cvmdi/errors.hpp"

namespace cvmdi {

namespace {

Eigen::ArrayXd standard_normals(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::ArrayXd out(static_cast<Eigen::Index>(n));
  for (auto& v : out) v = normal(rng);
  return out;
}

void require_same_length(Eigen::Index a, Eigen::Index b, const char* who) {
  if (a != b) throw DomainError(fmt::format("{}: sample streams differ in length ({} vs {})", who, a, b));
}

Rng chunk_rng(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk)};
  return Rng(seq);
}

}  // namespace

TwoModeSamples sample_two_mode(const SourceCMd& cm, std::size_t n, Rng& rng) {
  if (!cm.is_physical()) {
    throw DomainError(fmt::format("sample_two_mode: unphysical source CM (X={}, Y={}, Z={})", cm.x_var,
                                  cm.y_var, cm.z_corr));
  }
  // Cholesky of [[X, +-Z], [+-Z, Y]].
  const double l11 = std::sqrt(cm.x_var);
  const double l21 = cm.z_corr / l11;
  const double l22 = std::sqrt(std::max(0.0, cm.y_var - l21 * l21));

  TwoModeSamples s;
  s.mode1.resize(static_cast<Eigen::Index>(n), 2);
  s.mode2.resize(static_cast<Eigen::Index>(n), 2);
  const Eigen::ArrayXd ux = standard_normals(n, rng);
  const Eigen::ArrayXd vx = standard_normals(n, rng);
  const Eigen::ArrayXd up = standard_normals(n, rng);
  const Eigen::ArrayXd vp = standard_normals(n, rng);
  s.mode1.col(0) = l11 * ux;
  s.mode2.col(0) = l21 * ux + l22 * vx;
  s.mode1.col(1) = l11 * up;
  s.mode2.col(1) = -l21 * up + l22 * vp;
  return s;
}

TwoModeSamples sample_two_mode(const SourceCMd& cm, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_two_mode(cm, n, rng);
}

ModeSamples apply_lossy_channel(const ModeSamples& in, double eta, double eps, Rng& rng) {
  if (!(eta > 0.0) || eta > 1.0) throw DomainError("apply_lossy_channel: eta must lie in (0, 1]");
  if (!(eps >= 0.0)) throw DomainError("apply_lossy_channel: eps must be >= 0");
  const double noise_sd = std::sqrt(1.0 - eta + eta * eps);
  const auto n = static_cast<std::size_t>(in.rows());
  ModeSamples out(in.rows(), 2);
  out.col(0) = std::sqrt(eta) * in.col(0) + noise_sd * standard_normals(n, rng);
  out.col(1) = std::sqrt(eta) * in.col(1) + noise_sd * standard_normals(n, rng);
  return out;
}

RelayOutcome bell_measurement(const ModeSamples& a_prime, const ModeSamples& b_prime) {
  require_same_length(a_prime.rows(), b_prime.rows(), "bell_measurement");
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  return {(a_prime.col(0) - b_prime.col(0)) * inv_sqrt2, (a_prime.col(1) + b_prime.col(1)) * inv_sqrt2};
}

ModeSamples displace_mode(const ModeSamples& b1, double gain, const RelayOutcome& relay) {
  require_same_length(b1.rows(), relay.x_c.rows(), "displace_mode");
  require_same_length(b1.rows(), relay.p_d.rows(), "displace_mode");
  ModeSamples out(b1.rows(), 2);
  out.col(0) = b1.col(0) + gain * relay.x_c;
  out.col(1) = b1.col(1) + gain * relay.p_d;
  return out;
}

void JointMomentAccumulator::add(const ModeSamples& a1, const ModeSamples& b1p) {
  require_same_length(a1.rows(), b1p.rows(), "JointMomentAccumulator::add");
  for (Eigen::Index i = 0; i < a1.rows(); ++i) {
    const double xa = a1(i, 0), pa = a1(i, 1), xb = b1p(i, 0), pb = b1p(i, 1);
    const std::array<double, kStats> s{0.5 * (xa * xa + pa * pa), 0.5 * (xb * xb + pb * pb),
                                       0.5 * (xa * xb - pa * pb), xa * xb, pa * pb};
    for (int k = 0; k < kStats; ++k) {
      sum_[k] += s[k];
      sum_sq_[k] += s[k] * s[k];
    }
  }
  n_ += static_cast<std::size_t>(a1.rows());
}

void JointMomentAccumulator::merge(const JointMomentAccumulator& other) {
  for (int k = 0; k < kStats; ++k) {
    sum_[k] += other.sum_[k];
    sum_sq_[k] += other.sum_sq_[k];
  }
  n_ += other.n_;
}

JointCMEstimate JointMomentAccumulator::finalize() const {
  if (n_ < 2) throw DomainError("estimate_joint_cm: need at least two samples");
  const double n = static_cast<double>(n_);
  std::array<double, kStats> mean{}, se{};
  for (int k = 0; k < kStats; ++k) {
    mean[k] = sum_[k] / n;
    const double var = std::max(0.0, (sum_sq_[k] - n * mean[k] * mean[k]) / (n - 1.0));
    se[k] = std::sqrt(var / n);
  }
  if (!(mean[0] > 0.0) || !(mean[1] > 0.0) || se[0] == 0.0 || se[1] == 0.0) {
    throw DomainError("estimate_joint_cm: degenerate samples (zero variance)");
  }
  JointCMEstimate e;
  e.a = mean[0];
  e.b = mean[1];
  e.c = mean[2];
  e.cov_x = mean[3];
  e.cov_p = mean[4];
  e.se_a = se[0];
  e.se_b = se[1];
  e.se_c = se[2];
  e.se_cov_x = se[3];
  e.se_cov_p = se[4];
  e.samples = n_;
  return e;
}

JointCMEstimate estimate_joint_cm(const ModeSamples& a1, const ModeSamples& b1p) {
  if (static_cast<std::size_t>(a1.rows()) < kMinSamplesForEstimate) {
    throw DomainError(fmt::format("estimate_joint_cm: need at least {} samples", kMinSamplesForEstimate));
  }
  JointMomentAccumulator acc;
  acc.add(a1, b1p);
  return acc.finalize();
}

MCConfig MCConfig::protocol(const SourceCMd& alice, const SourceCMd& bob, const LinkBudgetd& link,
                            std::size_t samples, std::uint64_t seed) {
  MCConfig cfg;
  cfg.source_alice = alice;
  cfg.source_bob = bob;
  cfg.link = link;
  cfg.gain = std::sqrt(optimal_gain(bob.y_var, link.eta_b()));
  cfg.samples = samples;
  cfg.seed = seed;
  return cfg;
}

JointCMd analytic_joint_cm(const MCConfig& config) {
  const double gain_sq = config.gain * config.gain;
  const double eta = config.link.eta_a() * gain_sq / 2.0;
  const double eps = equivalent_excess_noise(config.link, gain_sq, config.source_bob.y_var);
  const double chi_t = 1.0 / eta - 1.0 + eps;
  return {config.source_alice.x_var, eta * (config.source_bob.y_var + chi_t),
          std::sqrt(eta) * config.source_alice.z_corr};
}

namespace {

JointMomentAccumulator run_chunk(const MCConfig& cfg, std::size_t chunk, std::size_t m, std::ostream* dump) {
  Rng rng = chunk_rng(cfg.seed, chunk);
  const TwoModeSamples alice = sample_two_mode(cfg.source_alice, m, rng);
  const TwoModeSamples bob = sample_two_mode(cfg.source_bob, m, rng);
  const ModeSamples a_prime = apply_lossy_channel(alice.mode2, cfg.link.eta_a(), cfg.link.eps_a, rng);
  const ModeSamples b_prime = apply_lossy_channel(bob.mode2, cfg.link.eta_b(), cfg.link.eps_b, rng);
  const RelayOutcome relay = bell_measurement(a_prime, b_prime);
  const ModeSamples b1p = displace_mode(bob.mode1, cfg.gain, relay);

  if (dump != nullptr) {
    for (Eigen::Index i = 0; i < alice.mode1.rows(); ++i) {
      *dump << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", alice.mode1(i, 0), alice.mode1(i, 1),
                           b1p(i, 0), b1p(i, 1), relay.x_c(i), relay.p_d(i));
    }
  }
  JointMomentAccumulator acc;
  acc.add(alice.mode1, b1p);
  return acc;
}

}  // namespace

MCReport mc_validate(const MCConfig& config, std::ostream* dump) {
  if (config.samples < kMinSamplesForEstimate) {
    throw DomainError(fmt::format("mc_validate: need at least {} samples", kMinSamplesForEstimate));
  }
  if (!config.source_alice.is_physical() || !config.source_bob.is_physical()) {
    throw DomainError("mc_validate: source covariance matrices must be physical");
  }
  if (!(config.gain >= 0.0)) throw DomainError("mc_validate: gain must be >= 0");

  const std::size_t chunks = std::max<std::size_t>(1, std::min(config.chunks, config.samples));
  std::vector<std::size_t> sizes(chunks, config.samples / chunks);
  for (std::size_t i = 0; i < config.samples % chunks; ++i) ++sizes[i];

  std::vector<JointMomentAccumulator> partial(chunks);
  if (dump != nullptr) {
    *dump << "x_A1,p_A1,x_B1p,p_B1p,X_C,P_D\n";
    for (std::size_t i = 0; i < chunks; ++i) partial[i] = run_chunk(config, i, sizes[i], dump);
  } else {
    std::vector<std::future<JointMomentAccumulator>> jobs;
    jobs.reserve(chunks);
    for (std::size_t i = 0; i < chunks; ++i) {
      jobs.push_back(std::async(std::launch::async, run_chunk, std::cref(config), i, sizes[i], nullptr));
    }
    for (std::size_t i = 0; i < chunks; ++i) partial[i] = jobs[i].get();
  }
  JointMomentAccumulator total;
  for (const auto& p : partial) total.merge(p);  // fixed order keeps the sum deterministic

  MCReport r;
  r.seed = config.seed;
  r.empirical = total.finalize();
  r.analytic = analytic_joint_cm(config);

  const double y_b = config.source_bob.y_var;
  const double z_gaussian = std::sqrt(y_b * y_b - 1.0);
  r.predicted_b_gap =
      std::numbers::sqrt2 * config.gain * std::sqrt(config.link.eta_b()) * (z_gaussian - config.source_bob.z_corr);
  r.mode = std::abs(z_gaussian - config.source_bob.z_corr) <= 1e-12 * z_gaussian ? "strict" : "discrepancy";

  const auto& e = r.empirical;
  r.z_scores = {(e.a - r.analytic.a) / e.se_a, (e.b - r.analytic.b - r.predicted_b_gap) / e.se_b,
                (e.c - r.analytic.c) / e.se_c};
  r.z_b_closed_form = (e.b - r.analytic.b) / e.se_b;
  r.pass = std::abs(r.z_scores[0]) < 3.0 && std::abs(r.z_scores[1]) < 3.0 && std::abs(r.z_scores[2]) < 3.0;
  return r;
}

}  // namespace cvmdi
