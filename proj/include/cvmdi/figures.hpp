#pragma once

// Data tables behind the modulation-variance, distance and reconciliation
// efficiency studies (extreme asymmetric configuration, 0.2 dB/km).

#include <string>
#include <vector>

namespace cvmdi {

struct FigureTable {
  std::string name;  // file stem, e.g. "fig3_vmod"
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// K versus V_M in [0.05, 1.5] for D = 15, 20, 25, 30 km (eps = 0.002, beta = 0.9).
FigureTable vmod_study();
/// K versus distance in [0, 40] km for DM (V_M = 0.4) and GM (V_M = 40) at
/// eps = 0.002 and 0.003 (beta = 0.9), plus the PLOB bound.
FigureTable distance_study();
/// K versus beta in [0.7, 1] at D = 15 and 20 km (eps = 0.002).
FigureTable beta_study();

}  // namespace cvmdi
