// cvmdi: key rates, sweeps, finders, Monte-Carlo validation and decoy
// feasibility for four-state CV-MDI-QKD.
//
// Exit codes: 0 success, 1 failed validation or I/O error, 2 domain error,
// 3 infeasible find.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "cvmdi/decoy.hpp"
#include "cvmdi/emit.hpp"
#include "cvmdi/errors.hpp"
#include "cvmdi/figures.hpp"
#include "cvmdi/mcsim.hpp"
#include "cvmdi/scenario.hpp"

namespace {

using namespace cvmdi;
using nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitDomain = 2;
constexpr int kExitInfeasible = 3;
constexpr double kGaussianDefaultVmod = 40.0;

struct ScenarioFlags {
  std::optional<std::string> config;
  std::optional<std::string> scheme;
  std::optional<double> vmod, lac, lbc, loss, eps, eps_a, eps_b, beta, eta_hom, v_el;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON scenario file (flags override its values)");
    app->add_option("--scheme", scheme, "four-state | gaussian")
        ->check(CLI::IsMember({"four-state", "gaussian", "dm", "gm"}));
    app->add_option("--vmod", vmod, "Modulation variance V_M (shot-noise units)");
    app->add_option("--lac", lac, "Alice-Charlie distance (km)");
    app->add_option("--lbc", lbc, "Bob-Charlie distance (km)");
    app->add_option("--loss", loss, "Fiber loss (dB/km)");
    app->add_option("--eps", eps, "Excess noise on both links");
    app->add_option("--eps-a", eps_a, "Excess noise, Alice-Charlie link");
    app->add_option("--eps-b", eps_b, "Excess noise, Bob-Charlie link");
    app->add_option("--beta", beta, "Reconciliation efficiency");
    app->add_option("--eta-hom", eta_hom, "Homodyne efficiency at the relay");
    app->add_option("--v-el", v_el, "Electronic noise at the relay (shot-noise units)");
  }

  json file_json() const {
    if (!config) return json::object();
    std::ifstream in(*config);
    if (!in) throw std::runtime_error(fmt::format("cannot open config '{}'", *config));
    return json::parse(in);
  }

  Scenario resolve() const { return resolve(file_json()); }

  Scenario resolve(const json& file) const {
    json j = file;
    if (scheme) j["scheme"] = *scheme;
    const std::string kind = j.value("scheme", std::string("four-state"));
    if (vmod) {
      j["vmod"] = *vmod;
    } else if (!j.contains("vmod") && (kind == "gaussian" || kind == "gm")) {
      j["vmod"] = kGaussianDefaultVmod;
    }
    const auto set = [&](const char* key, const std::optional<double>& v) {
      if (v) j[key] = *v;
    };
    set("lac", lac);
    set("lbc", lbc);
    set("loss_db_per_km", loss);
    set("eps_a", eps);
    set("eps_b", eps);
    set("eps_a", eps_a);
    set("eps_b", eps_b);
    set("beta", beta);
    set("eta_hom", eta_hom);
    set("v_el", v_el);
    return scenario_from_json(j);
  }
};

struct Output {
  std::optional<std::string> path;

  template <typename Fn>
  void write(Fn&& fn) const {
    if (!path) {
      fn(std::cout);
      return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", *path));
    fn(out);
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Asymptotic key rates for four-state CV-MDI-QKD"};
  app.require_subcommand(1);

  // keyrate
  auto* keyrate = app.add_subcommand("keyrate", "Key rate of a single scenario");
  ScenarioFlags kr_flags;
  kr_flags.attach(keyrate);
  bool kr_json = false;
  std::optional<double> decoy_p, p_est;
  keyrate->add_flag("--json", kr_json, "Emit JSON instead of CSV");
  keyrate->add_option("--decoy-p", decoy_p, "Key-state weight p; adds p(1-p_est) K to the JSON");
  keyrate->add_option("--p-est", p_est, "Estimation fraction p_est");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Key rate over a one-dimensional grid");
  ScenarioFlags sw_flags;
  sw_flags.attach(sweep_cmd);
  std::optional<std::string> sw_var;
  std::optional<double> sw_lo, sw_hi;
  std::optional<int> sw_steps;
  bool sw_log = false;
  unsigned sw_threads = 0;
  Output sw_out;
  std::string sw_format = "csv";
  sweep_cmd->add_option("--var", sw_var, "v_mod | distance | beta | excess_noise");
  sweep_cmd->add_option("--lo", sw_lo);
  sweep_cmd->add_option("--hi", sw_hi);
  sweep_cmd->add_option("--steps", sw_steps);
  sweep_cmd->add_flag("--log", sw_log, "Logarithmic grid");
  sweep_cmd->add_option("--threads", sw_threads, "Worker threads (0 = all cores)");
  sweep_cmd->add_option("--out", sw_out.path, "Output file (default stdout)");
  sweep_cmd->add_option("--format", sw_format)->check(CLI::IsMember({"csv", "json"}));

  // find
  auto* find = app.add_subcommand("find", "Optimal V_M, maximal distance, beta threshold or DM/GM crossing");
  ScenarioFlags fd_flags;
  fd_flags.attach(find);
  std::string target;
  double gm_vmod = kGaussianDefaultVmod;
  std::optional<double> fd_lo, fd_hi;
  bool fd_json = false;
  find->add_option("--target", target, "optimal-vm | max-distance | beta-threshold | crossing-distance | crossing-beta")
      ->required();
  find->add_option("--gm-vmod", gm_vmod, "Gaussian baseline V_M for crossings");
  find->add_option("--lo", fd_lo, "Search range start");
  find->add_option("--hi", fd_hi, "Search range end");
  find->add_flag("--json", fd_json);

  // mc-validate
  auto* mc = app.add_subcommand("mc-validate", "Monte-Carlo check of the joint covariance matrix");
  ScenarioFlags mc_flags;
  mc_flags.attach(mc);
  std::size_t samples = 1000000;
  std::uint64_t mc_seed = 42;
  std::size_t chunks = 16;
  std::string bob_source = "gaussian";
  std::optional<std::string> dump;
  mc->add_option("--samples", samples);
  mc->add_option("--seed", mc_seed);
  mc->add_option("--chunks", chunks);
  mc->add_option("--bob-source", bob_source, "gaussian (strict) | four-state (discrepancy)")
      ->check(CLI::IsMember({"gaussian", "four-state"}));
  mc->add_option("--dump", dump, "Write raw samples as CSV");

  // decoy
  auto* decoy = app.add_subcommand("decoy", "Decoy-state feasibility and label sampling");
  double alpha_sq = 0.2;
  std::optional<double> nbar;
  int cutoff = kDefaultCutoff;
  double plan_p = 0.5, plan_p_est = 0.1;
  std::size_t n_labels = 0;
  std::uint64_t decoy_seed = 42;
  Output labels_out;
  std::string labels_format = "bin";
  decoy->add_option("--alpha-sq", alpha_sq);
  decoy->add_option("--nbar", nbar, "Thermal reference mean photon number (default alpha^2)");
  decoy->add_option("--cutoff", cutoff);
  decoy->add_option("--p", plan_p);
  decoy->add_option("--p-est", plan_p_est);
  decoy->add_option("--samples", n_labels, "Number of labels to sample (0 = none)");
  decoy->add_option("--seed", decoy_seed);
  decoy->add_option("--out", labels_out.path, "Label output file");
  decoy->add_option("--format", labels_format)->check(CLI::IsMember({"bin", "csv"}));

  // figures
  auto* figures = app.add_subcommand("figures", "Emit the V_M, distance and beta study tables");
  std::string out_dir = "data";
  figures->add_option("--out-dir", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; usage errors share the domain-error code
    return app.exit(e) == 0 ? 0 : kExitDomain;
  }

  if (*keyrate) {
    const Scenario s = kr_flags.resolve();
    const KeyRateReportd r = run_scenario(s);
    if (kr_json) {
      json j = report_to_json(r, s);
      if (decoy_p || p_est) {
        const MixtureWeights w = mixture_weights(decoy_p.value_or(1.0), p_est.value_or(0.0));
        j["throughput_key_rate"] = round9(w.key * r.key_rate);
      }
      std::cout << j.dump(2) << '\n';
    } else {
      write_report_csv(std::cout, r);
    }
  } else if (*sweep_cmd) {
    const json file = sw_flags.file_json();
    SweepSpec spec = sweep_spec_from_json(file);
    spec.base = sw_flags.resolve(file);
    if (sw_var) spec.variable = parse_sweep_variable(*sw_var);
    if (sw_lo) spec.lo = *sw_lo;
    if (sw_hi) spec.hi = *sw_hi;
    if (sw_steps) spec.steps = *sw_steps;
    if (sw_log) spec.log_scale = true;
    const auto rows = sweep(spec, sw_threads);
    sw_out.write([&](std::ostream& out) {
      if (sw_format == "json") {
        json j = sweep_spec_to_json(spec);
        j["schema"] = "cvmdi.sweep/1";
        j["rows"] = json::array();
        for (const auto& r : rows) {
          j["rows"].push_back({{"value", round9(r.value)},
                               {"key_rate", std::isfinite(r.key_rate) ? json(round9(r.key_rate)) : json()},
                               {"i_ab", std::isfinite(r.i_ab) ? json(round9(r.i_ab)) : json()},
                               {"chi_be", std::isfinite(r.chi_be) ? json(round9(r.chi_be)) : json()},
                               {"plob", std::isfinite(r.plob) ? json(round9(r.plob)) : json()},
                               {"error", r.error}});
        }
        out << j.dump(2) << '\n';
      } else {
        write_sweep_csv(out, spec.variable, rows);
      }
    });
  } else if (*find) {
    const FinderTarget t = parse_finder_target(target);
    const Scenario s = fd_flags.resolve();
    FinderResult r;
    switch (t) {
      case FinderTarget::OptimalVm:
        r = find_optimal_vm(s, fd_lo.value_or(0.05), fd_hi.value_or(1.5));
        break;
      case FinderTarget::MaxDistance:
        r = find_max_distance(s);
        break;
      case FinderTarget::BetaThreshold:
        r = find_beta_threshold(s);
        break;
      case FinderTarget::CrossingDistance:
      case FinderTarget::CrossingBeta: {
        Scenario dm = s;
        if (dm.scheme.kind != ModulationKind::FourState) dm.scheme = ModulationSchemed::four_state_vmod(0.4);
        Scenario gm = s;
        gm.scheme = ModulationSchemed::gaussian(gm_vmod);
        const bool by_distance = t == FinderTarget::CrossingDistance;
        r = find_crossing(dm, gm, by_distance ? SweepVariable::Distance : SweepVariable::Beta,
                          fd_lo.value_or(by_distance ? 0.5 : 0.0), fd_hi.value_or(by_distance ? 40.0 : 1.0));
        break;
      }
    }
    if (fd_json) {
      std::cout << finder_to_json(r).dump(2) << '\n';
    } else {
      std::cout << "target,value,achieved_tolerance,iterations\n"
                << to_string(r.target) << ',' << format_number(r.value) << ','
                << format_number(r.achieved_tolerance) << ',' << r.iterations << '\n';
    }
  } else if (*mc) {
    Scenario s = mc_flags.resolve();
    const SourceCMd alice = source_covariance(s.scheme);
    const SourceCMd bob = bob_source == "gaussian" ? source_covariance(ModulationSchemed::gaussian(s.scheme.v_mod))
                                                   : source_covariance(ModulationSchemed::four_state_vmod(s.scheme.v_mod));
    MCConfig cfg = MCConfig::protocol(alice, bob, s.link, samples, mc_seed);
    cfg.chunks = chunks;
    MCReport r;
    if (dump) {
      std::ofstream out(*dump);
      if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", *dump));
      r = mc_validate(cfg, &out);
    } else {
      r = mc_validate(cfg);
    }
    std::cout << mc_report_to_json(r).dump(2) << '\n';
    return r.pass ? 0 : kExitFailure;
  } else if (*decoy) {
    DecoyPlan plan{plan_p, plan_p_est, alpha_sq, nbar.value_or(alpha_sq), decoy_seed};
    const DecoyFeasibility f = decoy_feasibility(plan.alpha_sq, plan.nbar, cutoff);
    std::cout << decoy_to_json(f, plan).dump(2) << '\n';
    if (n_labels > 0) {
      const auto labels = sample_labels(plan, n_labels);
      if (labels_format == "csv") {
        labels_out.write([&](std::ostream& out) { write_labels_csv(out, labels); });
      } else {
        if (!labels_out.path) throw DomainError("binary label output needs --out");
        labels_out.write([&](std::ostream& out) { write_labels_binary(out, labels); });
      }
    }
  } else if (*figures) {
    std::filesystem::create_directories(out_dir);
    for (const FigureTable& t : {vmod_study(), distance_study(), beta_study()}) {
      const auto path = std::filesystem::path(out_dir) / (t.name + ".csv");
      std::ofstream out(path);
      if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
      write_table_csv(out, t.header, t.rows);
      std::cerr << "wrote " << path.string() << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cvmdi::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const cvmdi::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const cvmdi::TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const cvmdi::ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
