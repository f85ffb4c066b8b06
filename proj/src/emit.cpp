#include "cvmdi/emit.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cvmdi/errors.hpp"

namespace cvmdi {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.9g}", v);
}

double round9(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(format_number(v));
}

namespace {

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round9(v);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

}  // namespace

json scenario_to_json(const Scenario& s) {
  return {{"scheme", to_string(s.scheme.kind)},
          {"vmod", number(s.scheme.v_mod)},
          {"lac", number(s.link.l_ac)},
          {"lbc", number(s.link.l_bc)},
          {"loss_db_per_km", number(s.link.loss_db_per_km)},
          {"eps_a", number(s.link.eps_a)},
          {"eps_b", number(s.link.eps_b)},
          {"beta", number(s.beta)},
          {"eta_hom", number(s.detector.eta_hom)},
          {"v_el", number(s.detector.v_el)},
          {"label", s.label}};
}

Scenario scenario_from_json(const json& j, const Scenario& defaults) {
  if (!j.is_object()) throw DomainError("scenario config must be a JSON object");
  Scenario s = defaults;
  const std::string scheme = get_or<std::string>(j, "scheme", to_string(defaults.scheme.kind));
  const double vmod = get_or<double>(j, "vmod", defaults.scheme.v_mod);
  if (scheme == "four-state" || scheme == "dm") {
    s.scheme = ModulationSchemed::four_state_vmod(vmod);
  } else if (scheme == "gaussian" || scheme == "gm") {
    s.scheme = ModulationSchemed::gaussian(vmod);
  } else {
    throw DomainError(fmt::format("unknown scheme '{}'", scheme));
  }
  s.link.l_ac = get_or<double>(j, "lac", defaults.link.l_ac);
  s.link.l_bc = get_or<double>(j, "lbc", defaults.link.l_bc);
  s.link.loss_db_per_km = get_or<double>(j, "loss_db_per_km", defaults.link.loss_db_per_km);
  s.link.eps_a = get_or<double>(j, "eps_a", defaults.link.eps_a);
  s.link.eps_b = get_or<double>(j, "eps_b", defaults.link.eps_b);
  s.beta = get_or<double>(j, "beta", defaults.beta);
  s.detector.eta_hom = get_or<double>(j, "eta_hom", defaults.detector.eta_hom);
  s.detector.v_el = get_or<double>(j, "v_el", defaults.detector.v_el);
  s.label = get_or<std::string>(j, "label", defaults.label);
  return s;
}

json sweep_spec_to_json(const SweepSpec& spec) {
  json j = scenario_to_json(spec.base);
  j["sweep"] = {{"var", to_string(spec.variable)},
                {"lo", number(spec.lo)},
                {"hi", number(spec.hi)},
                {"steps", spec.steps},
                {"log", spec.log_scale}};
  return j;
}

SweepSpec sweep_spec_from_json(const json& j, const SweepSpec& defaults) {
  SweepSpec spec = defaults;
  spec.base = scenario_from_json(j, defaults.base);
  if (const auto it = j.find("sweep"); it != j.end()) {
    const json& sw = *it;
    if (sw.contains("var")) spec.variable = parse_sweep_variable(sw.at("var").get<std::string>());
    spec.lo = get_or<double>(sw, "lo", spec.lo);
    spec.hi = get_or<double>(sw, "hi", spec.hi);
    spec.steps = get_or<int>(sw, "steps", spec.steps);
    spec.log_scale = get_or<bool>(sw, "log", spec.log_scale);
  }
  return spec;
}

json report_to_json(const KeyRateReportd& r, const Scenario& s) {
  return {{"schema", kKeyRateSchema},
          {"i_ab", number(r.i_ab)},
          {"kappa", {number(r.kappa[0]), number(r.kappa[1]), number(r.kappa[2])}},
          {"chi_be", number(r.chi_be)},
          {"key_rate", number(r.key_rate)},
          {"plob", number(r.plob)},
          {"beta", number(r.beta)},
          {"cm", {{"a", number(r.cm.a)}, {"b", number(r.cm.b)}, {"c", number(r.cm.c)}}},
          {"channel",
           {{"gain_sq", number(r.channel.gain_sq)},
            {"eta", number(r.channel.eta)},
            {"eps", number(r.channel.eps)},
            {"chi_t", number(r.channel.chi_t)},
            {"chi_hom", number(r.channel.chi_hom)},
            {"chi_t_prime", number(r.channel.chi_t_prime)}}},
          {"scenario", scenario_to_json(s)}};
}

json finder_to_json(const FinderResult& r) {
  return {{"schema", kFinderSchema},
          {"target", to_string(r.target)},
          {"value", number(r.value)},
          {"achieved_tolerance", number(r.achieved_tolerance)},
          {"iterations", r.iterations}};
}

json mc_report_to_json(const MCReport& r) {
  const auto& e = r.empirical;
  return {{"schema", kMcSchema},
          {"mode", r.mode},
          {"seed", r.seed},
          {"samples", e.samples},
          {"empirical",
           {{"a", number(e.a)},
            {"b", number(e.b)},
            {"c", number(e.c)},
            {"se_a", number(e.se_a)},
            {"se_b", number(e.se_b)},
            {"se_c", number(e.se_c)},
            {"cov_x", number(e.cov_x)},
            {"cov_p", number(e.cov_p)}}},
          {"analytic", {{"a", number(r.analytic.a)}, {"b", number(r.analytic.b)}, {"c", number(r.analytic.c)}}},
          {"predicted_b_gap", number(r.predicted_b_gap)},
          {"z_scores", {number(r.z_scores[0]), number(r.z_scores[1]), number(r.z_scores[2])}},
          {"z_b_closed_form", number(r.z_b_closed_form)},
          {"pass", r.pass}};
}

json decoy_to_json(const DecoyFeasibility& f, const DecoyPlan& plan) {
  const MixtureWeights w = mixture_weights(plan.p, plan.p_est);
  return {{"schema", kDecoySchema},
          {"alpha_sq", number(plan.alpha_sq)},
          {"nbar", number(plan.nbar)},
          {"p_max", number(f.p_max)},
          {"feasible", f.feasible()},
          {"residual_min_eigenvalue", f.residual_min_eigenvalue},
          {"cutoff", f.cutoff},
          {"weights", {{"key", number(w.key)}, {"decoy", number(w.decoy)}, {"est", number(w.estimation)}}},
          {"p", number(plan.p)},
          {"p_est", number(plan.p_est)}};
}

void write_sweep_csv(std::ostream& out, SweepVariable variable, const std::vector<SweepRow>& rows) {
  out << to_string(variable) << ",key_rate,i_ab,chi_be,plob,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << format_number(r.value) << ',' << format_number(r.key_rate) << ',' << format_number(r.i_ab) << ','
        << format_number(r.chi_be) << ',' << format_number(r.plob) << ',' << err << '\n';
  }
}

void write_report_csv(std::ostream& out, const KeyRateReportd& r) {
  out << "i_ab,kappa1,kappa2,kappa3,chi_be,beta,key_rate,plob\n";
  out << format_number(r.i_ab) << ',' << format_number(r.kappa[0]) << ',' << format_number(r.kappa[1]) << ','
      << format_number(r.kappa[2]) << ',' << format_number(r.chi_be) << ',' << format_number(r.beta) << ','
      << format_number(r.key_rate) << ',' << format_number(r.plob) << '\n';
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

}  // namespace cvmdi
