#include "cvmdi/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "cvmdi/errors.hpp"

namespace cvmdi {

namespace {

LinkBudgetd extreme_asymmetric(double d_km, double eps) {
  LinkBudgetd link;
  link.l_ac = d_km;
  link.l_bc = 0.0;
  link.eps_a = eps;
  link.eps_b = eps;
  return link;
}

}  // namespace

Scenario Scenario::four_state(double v_mod, double d_km, double eps, double beta) {
  Scenario s;
  s.scheme = ModulationSchemed::four_state_vmod(v_mod);
  s.link = extreme_asymmetric(d_km, eps);
  s.beta = beta;
  s.label = "DM";
  return s;
}

Scenario Scenario::gaussian(double v_mod, double d_km, double eps, double beta) {
  Scenario s;
  s.scheme = ModulationSchemed::gaussian(v_mod);
  s.link = extreme_asymmetric(d_km, eps);
  s.beta = beta;
  s.label = "GM";
  return s;
}

KeyRateReportd run_scenario(const Scenario& s) {
  return secret_key_rate(s.scheme, s.link, s.detector, s.beta);
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::VMod:
      return "v_mod";
    case SweepVariable::Distance:
      return "distance";
    case SweepVariable::Beta:
      return "beta";
    case SweepVariable::ExcessNoise:
      return "excess_noise";
  }
  return "?";
}

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "v_mod" || name == "vmod" || name == "v-mod") return SweepVariable::VMod;
  if (name == "distance") return SweepVariable::Distance;
  if (name == "beta") return SweepVariable::Beta;
  if (name == "excess_noise" || name == "excess-noise" || name == "eps") return SweepVariable::ExcessNoise;
  throw DomainError(fmt::format("unknown sweep variable '{}'", name));
}

Scenario with_variable(const Scenario& base, SweepVariable variable, double value) {
  Scenario s = base;
  switch (variable) {
    case SweepVariable::VMod:
      s.scheme = base.scheme.kind == ModulationKind::FourState ? ModulationSchemed::four_state_vmod(value)
                                                                : ModulationSchemed::gaussian(value);
      break;
    case SweepVariable::Distance:
      s.link.l_ac = value;
      break;
    case SweepVariable::Beta:
      s.beta = value;
      break;
    case SweepVariable::ExcessNoise:
      s.link.eps_a = value;
      s.link.eps_b = value;
      break;
  }
  return s;
}

std::vector<double> SweepSpec::grid() const {
  if (!(lo < hi)) throw DomainError("sweep: lo must be < hi");
  if (steps < 2) throw DomainError("sweep: steps must be >= 2");
  if (log_scale && !(lo > 0.0)) throw DomainError("sweep: log grid needs lo > 0");
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / (steps - 1);
    g[i] = log_scale ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  g.back() = hi;
  return g;
}

std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads) {
  const std::vector<double> grid = spec.grid();
  std::vector<SweepRow> rows(grid.size());

  const auto eval = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = grid[i];
    try {
      const KeyRateReportd r = run_scenario(with_variable(spec.base, spec.variable, grid[i]));
      row.key_rate = r.key_rate;
      row.i_ab = r.i_ab;
      row.chi_be = r.chi_be;
      row.plob = r.plob;
    } catch (const std::exception& e) {
      row.key_rate = row.i_ab = row.chi_be = row.plob = std::nan("");
      row.error = e.what();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) eval(i);
    });
  }
  for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) eval(i);
  pool.clear();  // join
  return rows;
}

std::string to_string(FinderTarget t) {
  switch (t) {
    case FinderTarget::OptimalVm:
      return "optimal_vm";
    case FinderTarget::MaxDistance:
      return "max_distance";
    case FinderTarget::BetaThreshold:
      return "beta_threshold";
    case FinderTarget::CrossingDistance:
      return "crossing_distance";
    case FinderTarget::CrossingBeta:
      return "crossing_beta";
  }
  return "?";
}

FinderTarget parse_finder_target(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '-', '_');
  for (auto t : {FinderTarget::OptimalVm, FinderTarget::MaxDistance, FinderTarget::BetaThreshold,
                 FinderTarget::CrossingDistance, FinderTarget::CrossingBeta}) {
    if (to_string(t) == n) return t;
  }
  throw DomainError(fmt::format("unknown finder target '{}'", name));
}

FinderResult maximize_unimodal(const std::function<double(double)>& f, double lo, double hi, double tol,
                               int scan_points) {
  if (!(lo < hi)) throw DomainError("maximize_unimodal: empty bracket");
  std::vector<double> xs(scan_points + 1), ys(scan_points + 1);
  for (int i = 0; i <= scan_points; ++i) {
    xs[i] = lo + (hi - lo) * i / scan_points;
    ys[i] = f(xs[i]);
  }
  const auto best = static_cast<int>(std::max_element(ys.begin(), ys.end()) - ys.begin());
  if (best == 0 || best == scan_points) {
    throw InfeasibleError(fmt::format("no interior maximum on [{}, {}] (best at {})", lo, hi, xs[best]));
  }

  // The scan's best point and its neighbours bracket the maximum.
  double a = xs[best - 1], b = xs[best + 1];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  FinderResult r;
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++r.iterations;
  }
  r.value = 0.5 * (a + b);
  r.achieved_tolerance = b - a;
  return r;
}

FinderResult bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo), fhi = f(hi);
  if (!(std::signbit(flo) != std::signbit(fhi)) || std::isnan(flo) || std::isnan(fhi)) {
    throw InfeasibleError(fmt::format("no sign change on [{}, {}] (f = {}, {})", lo, hi, flo, fhi));
  }
  FinderResult r;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
    ++r.iterations;
  }
  // Secant step within the bracket; exact when f is linear.
  double root = lo - flo * (hi - lo) / (fhi - flo);
  if (!(root >= lo && root <= hi)) root = 0.5 * (lo + hi);
  r.value = root;
  r.achieved_tolerance = hi - lo;
  return r;
}

FinderResult find_optimal_vm(const Scenario& base, double lo, double hi) {
  const auto k = [&](double v) { return run_scenario(with_variable(base, SweepVariable::VMod, v)).key_rate; };
  FinderResult r = maximize_unimodal(k, lo, hi, kVmTolerance);
  r.target = FinderTarget::OptimalVm;
  return r;
}

FinderResult find_beta_threshold(const Scenario& base) {
  const auto k = [&](double b) { return run_scenario(with_variable(base, SweepVariable::Beta, b)).key_rate; };
  if (!(k(1.0) > 0.0)) throw InfeasibleError("no key even at beta = 1: no threshold in [0, 1]");
  FinderResult r = bisect_root(k, 0.0, 1.0, kBetaTolerance);
  r.target = FinderTarget::BetaThreshold;
  return r;
}

FinderResult find_max_distance(const Scenario& base) {
  const auto k = [&](double d) { return run_scenario(with_variable(base, SweepVariable::Distance, d)).key_rate; };
  if (!(k(0.0) > 0.0)) throw InfeasibleError("no key at zero distance");
  double hi = 10.0;
  while (k(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 5000.0) throw InfeasibleError("key rate stays positive beyond 5000 km");
  }
  FinderResult r = bisect_root(k, 0.0, hi, kDistanceTolerance);
  r.target = FinderTarget::MaxDistance;
  return r;
}

FinderResult find_crossing(const Scenario& base_dm, const Scenario& base_gm, SweepVariable variable, double lo,
                           double hi, int scan_points) {
  if (variable != SweepVariable::Distance && variable != SweepVariable::Beta) {
    throw DomainError("find_crossing: variable must be distance or beta");
  }
  const auto diff = [&](double v) {
    return run_scenario(with_variable(base_dm, variable, v)).key_rate -
           run_scenario(with_variable(base_gm, variable, v)).key_rate;
  };
  // First sign change on the scan grid.
  double prev_x = lo, prev_f = diff(lo);
  for (int i = 1; i <= scan_points; ++i) {
    const double x = lo + (hi - lo) * i / scan_points;
    const double fx = diff(x);
    if (std::signbit(fx) != std::signbit(prev_f)) {
      const double tol = variable == SweepVariable::Distance ? 1e-3 : kBetaTolerance;
      FinderResult r = bisect_root(diff, prev_x, x, tol);
      r.target = variable == SweepVariable::Distance ? FinderTarget::CrossingDistance : FinderTarget::CrossingBeta;
      return r;
    }
    prev_x = x;
    prev_f = fx;
  }
  throw InfeasibleError(fmt::format("K_DM - K_GM keeps its sign on [{}, {}]", lo, hi));
}

ShapeSummary curve_shape(const std::vector<double>& v) {
  ShapeSummary s;
  int prev_sign = 0;
  for (std::size_t i = 2; i < v.size(); ++i) {
    const double d2 = v[i] - 2.0 * v[i - 1] + v[i - 2];
    const int sign = (d2 > 0) - (d2 < 0);
    if (sign != 0 && prev_sign != 0 && sign != prev_sign) ++s.curvature_sign_changes;
    if (sign != 0) prev_sign = sign;
  }
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] > v[i - 1] && v[i] > v[i + 1]) ++s.local_maxima;
  }
  return s;
}

}  // namespace cvmdi
