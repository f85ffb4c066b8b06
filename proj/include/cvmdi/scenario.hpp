#pragma once

// Scenario runner: single-point key rates, parameter sweeps and finders.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cvmdi/keyrate.hpp"

namespace cvmdi {

/// Default parameters: relay at Bob (L_BC = 0), 0.2 dB/km, ideal detectors.
struct Scenario {
  ModulationSchemed scheme = ModulationSchemed::four_state_vmod(0.4);
  LinkBudgetd link;
  DetectorModeld detector;
  double beta = 0.9;
  std::string label;

  /// Discrete (four-state) scenario at distance `d_km` with eps_A = eps_B = eps.
  static Scenario four_state(double v_mod, double d_km, double eps, double beta);
  /// Gaussian-modulated baseline.
  static Scenario gaussian(double v_mod, double d_km, double eps, double beta);
};

KeyRateReportd run_scenario(const Scenario& s);

enum class SweepVariable { VMod, Distance, Beta, ExcessNoise };

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);

/// Copy of `base` with `variable` set to `value` (excess noise sets both links).
Scenario with_variable(const Scenario& base, SweepVariable variable, double value);

struct SweepSpec {
  SweepVariable variable = SweepVariable::Distance;
  double lo = 0;
  double hi = 40;
  int steps = 401;
  bool log_scale = false;
  Scenario base;

  std::vector<double> grid() const;
};

struct SweepRow {
  double value = 0;
  double key_rate = 0;
  double i_ab = 0;
  double chi_be = 0;
  double plob = 0;
  std::string error;  // empty on success
};

/// One row per grid point, in grid order. Failing points record their error
/// and the sweep continues. `threads` = 0 uses the hardware concurrency.
std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads = 0);

enum class FinderTarget { OptimalVm, MaxDistance, BetaThreshold, CrossingDistance, CrossingBeta };

std::string to_string(FinderTarget t);
FinderTarget parse_finder_target(const std::string& name);

struct FinderResult {
  FinderTarget target = FinderTarget::OptimalVm;
  double value = 0;
  double achieved_tolerance = 0;
  int iterations = 0;
};

/// Root-finder tolerances (1e-4 in beta, 0.05 km in distance, 1e-3 in V_M).
inline constexpr double kBetaTolerance = 1e-4;
inline constexpr double kDistanceTolerance = 0.05;
inline constexpr double kVmTolerance = 1e-3;

/// Golden-section maximization of f on [lo, hi] after a coarse scan that locates
/// the single interior maximum. Throws InfeasibleError if the scan's best point
/// sits on the boundary.
FinderResult maximize_unimodal(const std::function<double(double)>& f, double lo, double hi, double tol,
                               int scan_points = 60);

/// Bisection for a sign change of f on [lo, hi], finished with a secant step
/// inside the final bracket. Throws InfeasibleError without a sign change.
FinderResult bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol);

FinderResult find_optimal_vm(const Scenario& base, double lo = 0.05, double hi = 1.5);
FinderResult find_beta_threshold(const Scenario& base);
FinderResult find_max_distance(const Scenario& base);

/// Where K_DM = K_GM, scanning `lo..hi` in the chosen variable (distance or beta).
FinderResult find_crossing(const Scenario& base_dm, const Scenario& base_gm, SweepVariable variable,
                           double lo, double hi, int scan_points = 400);

/// Counts sign changes of the discrete second difference and interior local
/// maxima of a sampled curve.
struct ShapeSummary {
  int curvature_sign_changes = 0;
  int local_maxima = 0;
};
ShapeSummary curve_shape(const std::vector<double>& values);

}  // namespace cvmdi
