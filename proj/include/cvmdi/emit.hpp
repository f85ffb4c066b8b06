#pragma once

// CSV and JSON serialization. Floats carry 9 significant digits; JSON
// documents carry a "schema" tag.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "cvmdi/decoy.hpp"
#include "cvmdi/mcsim.hpp"
#include "cvmdi/scenario.hpp"

namespace cvmdi {

inline constexpr const char* kKeyRateSchema = "cvmdi.keyrate/1";
inline constexpr const char* kFinderSchema = "cvmdi.find/1";
inline constexpr const char* kMcSchema = "cvmdi.mc-validate/1";
inline constexpr const char* kDecoySchema = "cvmdi.decoy/1";

/// "%.9g"; non-finite values print as inf, -inf, nan.
std::string format_number(double v);

/// Rounds to 9 significant digits (the value format_number prints).
double round9(double v);

nlohmann::json scenario_to_json(const Scenario& s);
/// Reads the keys written by scenario_to_json; absent keys keep `defaults`.
Scenario scenario_from_json(const nlohmann::json& j, const Scenario& defaults = {});

nlohmann::json sweep_spec_to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const nlohmann::json& j, const SweepSpec& defaults = {});

/// {schema, i_ab, kappa, chi_be, key_rate, plob, beta, cm, channel, scenario}.
/// An infinite PLOB value (zero-length line) is written as null.
nlohmann::json report_to_json(const KeyRateReportd& r, const Scenario& s);

nlohmann::json finder_to_json(const FinderResult& r);
nlohmann::json mc_report_to_json(const MCReport& r);
nlohmann::json decoy_to_json(const DecoyFeasibility& f, const DecoyPlan& plan);

/// Header: <variable>,key_rate,i_ab,chi_be,plob,error. Rows in input order.
void write_sweep_csv(std::ostream& out, SweepVariable variable, const std::vector<SweepRow>& rows);

/// One header line and one data row.
void write_report_csv(std::ostream& out, const KeyRateReportd& r);

/// Generic wide table: header then rows of numbers.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace cvmdi
