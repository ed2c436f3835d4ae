#pragma once

#include "dimorse/homology.hpp"
#include "dimorse/transition_graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dimorse {

struct ScenarioChecks {
  std::optional<int> morse_sets;          // exact number of Morse sets
  std::optional<std::vector<std::vector<int>>> critical_groups;  // ranks per Morse set
  double certificate_min_rate = 0.99;
  bool require_report_pass = true;        // Morse inequalities and equation
};

struct Scenario {
  std::string name;
  std::string system_kind;  // "chua" or "affine"
  SetValuedMapSpec system;
  Vec lo, hi;
  int depth = 0;
  GraphParams graph;
  bool prune = false;
  double prune_max_diameter_cells = 2.0;
  std::size_t certificate_samples = 10000;
  double certificate_tolerance = -1.0;  // negative: one slope unit
  Coefficients coefficients = Coefficients::z2;
  int neighborhood_depth = 1;
  int neighborhood_max_depth = 12;
  std::vector<double> robustness_deltas;
  double inflation_slack = 0.05;
  std::string output_dir;
  std::uint64_t seed = 0;
  ScenarioChecks checks;

  CubicalGrid grid() const { return CubicalGrid(lo, hi, depth); }
};

// Parses and validates a scenario document; raises config on any problem.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace dimorse
