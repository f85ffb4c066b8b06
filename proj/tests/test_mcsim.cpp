#include "doctest.h"

#include <cmath>
#include <sstream>

#include "cvmdi/errors.hpp"
#include "cvmdi/mcsim.hpp"

using namespace cvmdi;

namespace {

double mean(const Eigen::ArrayXd& v) { return v.mean(); }
double cov(const Eigen::ArrayXd& u, const Eigen::ArrayXd& v) {
  return ((u - mean(u)) * (v - mean(v))).sum() / double(u.size() - 1);
}
double var(const Eigen::ArrayXd& v) { return cov(v, v); }

// 3-sigma band for a sample variance of a Gaussian with variance s2
double var_band(double s2, std::size_t n) { return 3.0 * s2 * std::sqrt(2.0 / double(n)); }

const SourceCMd kFour{1.4, 1.4, 0.964874929};
const SourceCMd kGauss{1.4, 1.4, std::sqrt(0.96)};

LinkBudgetd half_link(double eps = 0.0) {
  LinkBudgetd l;
  l.l_ac = 15.05149978;  // eta_A = 0.5
  l.eps_a = l.eps_b = eps;
  return l;
}

}  // namespace

TEST_CASE("two-mode sampling") {
  const std::size_t n = 1000000;
  SUBCASE("vacuum pairs") {
    const auto s = sample_two_mode(SourceCMd{1.0, 1.0, 0.0}, n, 3);
    CHECK(std::abs(var(s.mode1.col(0)) - 1.0) < var_band(1.0, n));
    CHECK(std::abs(cov(s.mode1.col(0), s.mode2.col(0))) < 3.0 / std::sqrt(double(n)));
  }
  SUBCASE("four-state CM, sigma_z structure") {
    const auto s = sample_two_mode(kFour, n, 11);
    const double se = std::sqrt((1.4 * 1.4 + kFour.z_corr * kFour.z_corr) / double(n));
    CHECK(std::abs(cov(s.mode1.col(0), s.mode2.col(0)) - kFour.z_corr) < 3.0 * se);
    CHECK(std::abs(cov(s.mode1.col(1), s.mode2.col(1)) + kFour.z_corr) < 3.0 * se);
    CHECK(std::abs(var(s.mode2.col(1)) - 1.4) < var_band(1.4, n));
  }
  SUBCASE("determinism") {
    const auto a = sample_two_mode(kFour, 1000, 17);
    const auto b = sample_two_mode(kFour, 1000, 17);
    CHECK((a.mode1 == b.mode1).all());
    CHECK((a.mode2 == b.mode2).all());
  }
  CHECK_THROWS_AS(sample_two_mode(SourceCMd{1.4, 1.4, 2.0}, 10, 1), DomainError);
}

TEST_CASE("lossy channel") {
  const std::size_t n = 1000000;
  Rng rng(5);
  const auto s = sample_two_mode(kFour, n, 23);
  SUBCASE("identity") {
    const auto out = apply_lossy_channel(s.mode2, 1.0, 0.0, rng);
    CHECK((out == s.mode2).all());
  }
  SUBCASE("loss on vacuum") {
    const auto vac = sample_two_mode(SourceCMd{}, n, 29);
    const auto out = apply_lossy_channel(vac.mode1, 0.5, 0.0, rng);
    CHECK(std::abs(var(out.col(0)) - 1.0) < var_band(1.0, n));
  }
  SUBCASE("20 km with excess noise") {
    const double eta = 0.398107, eps = 0.002;
    const double expect = eta * 1.4 + 1.0 - eta + eta * eps;
    const auto out = apply_lossy_channel(s.mode2, eta, eps, rng);
    CHECK(expect == doctest::Approx(1.160039).epsilon(1e-6));
    CHECK(std::abs(var(out.col(0)) - expect) < var_band(expect, n));
    CHECK(std::abs(var(out.col(1)) - expect) < var_band(expect, n));
  }
  CHECK_THROWS_AS(apply_lossy_channel(s.mode2, 0.0, 0.0, rng), DomainError);
}

TEST_CASE("Bell measurement and displacement") {
  const std::size_t n = 1000000;
  Rng rng(31);
  SUBCASE("identical inputs cancel in X_C") {
    const auto s = sample_two_mode(kFour, 1000, 1);
    const auto relay = bell_measurement(s.mode1, s.mode1);
    CHECK(relay.x_c.abs().maxCoeff() == 0.0);
  }
  SUBCASE("vacuum inputs") {
    const auto s = sample_two_mode(SourceCMd{}, n, 2);
    const auto relay = bell_measurement(s.mode1, s.mode2);
    CHECK(std::abs(var(relay.x_c) - 1.0) < var_band(1.0, n));
    CHECK(std::abs(var(relay.p_d) - 1.0) < var_band(1.0, n));
  }
  SUBCASE("zero gain is the identity") {
    const auto s = sample_two_mode(kFour, 1000, 4);
    const auto relay = bell_measurement(s.mode1, s.mode2);
    CHECK((displace_mode(s.mode1, 0.0, relay) == s.mode1).all());
  }
  SUBCASE("length mismatch") {
    const auto a = sample_two_mode(kFour, 10, 1);
    const auto b = sample_two_mode(kFour, 11, 1);
    CHECK_THROWS_AS(bell_measurement(a.mode1, b.mode1), DomainError);
  }
  SUBCASE("full pipeline by hand") {
    // eta_A = 0.5, eta_B = 1, eps = 0, optimal g, Gaussian sources
    const double eta_a = 0.5, g = std::sqrt(1.0 / 3.0);
    const auto alice = sample_two_mode(kGauss, n, 41);
    const auto bob = sample_two_mode(kGauss, n, 43);
    const auto a_prime = apply_lossy_channel(alice.mode2, eta_a, 0.0, rng);
    const auto b_prime = apply_lossy_channel(bob.mode2, 1.0, 0.0, rng);
    const auto relay = bell_measurement(a_prime, b_prime);
    const double vxc = (eta_a * 1.4 + 1.0 - eta_a + 1.4) / 2.0;
    CHECK(std::abs(var(relay.x_c) - vxc) < var_band(vxc, n));
    const auto b1p = displace_mode(bob.mode1, g, relay);
    CHECK(std::abs(var(b1p.col(0)) - 1.0333333) < var_band(1.0333333, n));
    const double c = std::sqrt(1.0 / 12.0) * kGauss.z_corr;
    const double se = std::sqrt((1.4 * 1.0333 + c * c) / double(n));
    CHECK(std::abs(cov(alice.mode1.col(0), b1p.col(0)) - c) < 3.0 * se);
    CHECK(std::abs(cov(alice.mode1.col(1), b1p.col(1)) + c) < 3.0 * se);
  }
}

TEST_CASE("joint CM estimator") {
  SUBCASE("synthetic input from the analytic CM") {
    const JointCMd cm{1.4, 31.0 / 30.0, std::sqrt(1.0 / 12.0) * kGauss.z_corr};
    const auto s = sample_two_mode(SourceCMd{cm.a, cm.b, cm.c}, 1000000, 77);
    const auto e = estimate_joint_cm(s.mode1, s.mode2);
    CHECK(std::abs(e.a - cm.a) < 3.0 * e.se_a);
    CHECK(std::abs(e.b - cm.b) < 3.0 * e.se_b);
    CHECK(std::abs(e.c - cm.c) < 3.0 * e.se_c);
    CHECK(e.c > 0.0);
    CHECK(e.cov_x > 0.0);
    CHECK(e.cov_p < 0.0);
    CHECK(std::abs(e.cov_x + e.cov_p) < 3.0 * std::hypot(e.se_cov_x, e.se_cov_p));
  }
  SUBCASE("standard errors follow 1/sqrt(n)") {
    std::vector<double> se;
    for (std::size_t n : {10000, 100000, 1000000}) {
      const auto s = sample_two_mode(kFour, n, 101);
      se.push_back(estimate_joint_cm(s.mode1, s.mode2).se_c);
    }
    CHECK(se[0] / se[1] == doctest::Approx(std::sqrt(10.0)).epsilon(0.1));
    CHECK(se[1] / se[2] == doctest::Approx(std::sqrt(10.0)).epsilon(0.1));

    const auto s1 = sample_two_mode(kFour, 200000, 5);
    const auto s2 = sample_two_mode(kFour, 400000, 5);
    CHECK(estimate_joint_cm(s1.mode1, s1.mode2).se_b / estimate_joint_cm(s2.mode1, s2.mode2).se_b ==
          doctest::Approx(std::sqrt(2.0)).epsilon(0.1));
  }
  SUBCASE("too few samples") {
    const auto s = sample_two_mode(kFour, 9999, 1);
    CHECK_THROWS_AS(estimate_joint_cm(s.mode1, s.mode2), DomainError);
  }
  SUBCASE("merging equals one pass") {
    const auto s = sample_two_mode(kFour, 20000, 8);
    JointMomentAccumulator whole, lo, hi;
    whole.add(s.mode1, s.mode2);
    lo.add(s.mode1.topRows(7000), s.mode2.topRows(7000));
    hi.add(s.mode1.bottomRows(13000), s.mode2.bottomRows(13000));
    lo.merge(hi);
    CHECK(lo.count() == whole.count());
    CHECK(lo.finalize().c == doctest::Approx(whole.finalize().c).epsilon(1e-12));
  }
}

TEST_CASE("mc_validate: strict mode") {
  SUBCASE("half-transmitting Alice link") {
    const auto cfg = MCConfig::protocol(kFour, kGauss, half_link(), 1000000, 42);
    const auto r = mc_validate(cfg);
    CHECK(r.mode == "strict");
    CHECK(r.analytic.a == doctest::Approx(1.4));
    CHECK(r.analytic.b == doctest::Approx(1.0333333).epsilon(1e-6));
    CHECK(r.analytic.c == doctest::Approx(std::sqrt(1.0 / 12.0) * kFour.z_corr).epsilon(1e-6));
    CHECK(r.pass);
  }
  SUBCASE("20 km, eps = 0.002") {
    LinkBudgetd l;
    l.l_ac = 20.0;
    l.eps_a = l.eps_b = 0.002;
    const auto r = mc_validate(MCConfig::protocol(kFour, kGauss, l, 1000000, 7));
    CHECK(r.pass);
    CHECK(r.empirical.c > 0.0);
  }
  SUBCASE("determinism") {
    const auto cfg = MCConfig::protocol(kFour, kGauss, half_link(0.002), 20000, 9);
    const auto a = mc_validate(cfg);
    const auto b = mc_validate(cfg);
    CHECK(a.empirical.a == b.empirical.a);
    CHECK(a.empirical.b == b.empirical.b);
    CHECK(a.empirical.c == b.empirical.c);
    CHECK(a.z_scores == b.z_scores);
  }
  SUBCASE("dumped samples") {
    std::ostringstream dump;
    const auto cfg = MCConfig::protocol(kFour, kGauss, half_link(), 10000, 3);
    mc_validate(cfg, &dump);
    const std::string out = dump.str();
    CHECK(out.rfind("x_A1,p_A1,x_B1p,p_B1p,X_C,P_D\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 10001);
  }
  CHECK_THROWS_AS(mc_validate(MCConfig::protocol(kFour, kGauss, half_link(), 100, 1)), DomainError);
}

TEST_CASE("mc_validate: four-state correlation at Bob") {
  const auto cfg = MCConfig::protocol(kFour, kFour, LinkBudgetd{}, 1000000, 42);
  const auto r = mc_validate(cfg);
  CHECK(r.mode == "discrepancy");
  CHECK(r.predicted_b_gap == doctest::Approx(0.01218).epsilon(1e-3));
  const double gap = r.empirical.b - r.analytic.b;
  CHECK(std::abs(gap - r.predicted_b_gap) < 3.0 * r.empirical.se_b);
  CHECK(r.pass);
}
