#pragma once

#include "dimorse/morse.hpp"

#include <string>
#include <vector>

namespace dimorse {

struct RobustnessEntry {
  double delta = 0.0;
  std::size_t attractor_cells = 0;
  double hausdorff = 0.0;  // to the δ = 0 attractor, NaN when not absorbing
  bool absorbing = true;
  std::string message;
};

// Hausdorff distance between the state-space unions of two cell sets,
// evaluated on cell corners and centers against exact box distances.
double hausdorff_distance(const CubicalGrid& grid, const CellSet& a, const CellSet& b);

// Global attractors of the inflated systems for each δ (ascending, starting
// at 0) and their distance to the unperturbed one. A δ whose graph has no
// bounded cells is reported as not absorbing instead of failing.
std::vector<RobustnessEntry> inflated_robustness(const SetValuedMapSpec& spec, const CubicalGrid& grid,
                                                 const GraphParams& params, const std::vector<double>& deltas,
                                                 double slack = 0.05);

// Non-decreasing in δ up to the given slack.
bool distances_monotone(const std::vector<RobustnessEntry>& entries, double slack);

std::string robustness_json(const std::vector<RobustnessEntry>& entries, double cell_width);

}  // namespace dimorse
