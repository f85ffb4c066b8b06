#include "cvmdi/figures.hpp"

#include <fmt/format.h>

#include "cvmdi/scenario.hpp"

namespace cvmdi {

namespace {

constexpr double kDmVmod = 0.4;
constexpr double kGmVmod = 40.0;

std::vector<double> column(const SweepSpec& spec) {
  std::vector<double> k;
  for (const auto& row : sweep(spec)) k.push_back(row.key_rate);
  return k;
}

FigureTable assemble(std::string name, std::vector<std::string> header, const std::vector<double>& grid,
                     const std::vector<std::vector<double>>& columns) {
  FigureTable t{std::move(name), std::move(header), {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i]};
    for (const auto& c : columns) row.push_back(c[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

FigureTable vmod_study() {
  SweepSpec spec;
  spec.variable = SweepVariable::VMod;
  spec.lo = 0.05;
  spec.hi = 1.5;
  spec.steps = 146;
  std::vector<std::string> header{"v_mod"};
  std::vector<std::vector<double>> cols;
  for (double d : {15.0, 20.0, 25.0, 30.0}) {
    spec.base = Scenario::four_state(kDmVmod, d, 0.002, 0.9);
    cols.push_back(column(spec));
    header.push_back(fmt::format("k_dm_d{:g}", d));
  }
  return assemble("fig3_vmod", header, spec.grid(), cols);
}

FigureTable distance_study() {
  SweepSpec spec;
  spec.variable = SweepVariable::Distance;
  spec.lo = 0.0;
  spec.hi = 40.0;
  spec.steps = 401;
  std::vector<std::string> header{"distance"};
  std::vector<std::vector<double>> cols;
  for (double eps : {0.002, 0.003}) {
    spec.base = Scenario::four_state(kDmVmod, 0.0, eps, 0.9);
    cols.push_back(column(spec));
    header.push_back(fmt::format("k_dm_eps{:g}", eps));
    spec.base = Scenario::gaussian(kGmVmod, 0.0, eps, 0.9);
    cols.push_back(column(spec));
    header.push_back(fmt::format("k_gm_eps{:g}", eps));
  }
  std::vector<double> plob;
  for (const auto& row : sweep(spec)) plob.push_back(row.plob);
  cols.push_back(plob);
  header.push_back("plob");
  return assemble("fig4_distance", header, spec.grid(), cols);
}

FigureTable beta_study() {
  SweepSpec spec;
  spec.variable = SweepVariable::Beta;
  spec.lo = 0.7;
  spec.hi = 1.0;
  spec.steps = 301;
  std::vector<std::string> header{"beta"};
  std::vector<std::vector<double>> cols;
  for (double d : {15.0, 20.0}) {
    spec.base = Scenario::four_state(kDmVmod, d, 0.002, 0.9);
    cols.push_back(column(spec));
    header.push_back(fmt::format("k_dm_d{:g}", d));
    spec.base = Scenario::gaussian(kGmVmod, d, 0.002, 0.9);
    cols.push_back(column(spec));
    header.push_back(fmt::format("k_gm_d{:g}", d));
  }
  return assemble("fig5_beta", header, spec.grid(), cols);
}

}  // namespace cvmdi
