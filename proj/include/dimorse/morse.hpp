#pragma once

#include "dimorse/graph_algorithms.hpp"

#include <optional>
#include <string>

namespace dimorse {

// Reachability, recurrence and exit information shared by the graph queries.
class GraphAnalysis {
 public:
  explicit GraphAnalysis(const TransitionGraph& g);

  const TransitionGraph& graph() const { return *g_; }
  const TransitionGraph& reversed() const { return rev_; }
  const SccResult& scc() const { return scc_; }
  bool recurrent(std::int32_t c) const { return scc_.recurrent[scc_.component[c]] != 0; }
  bool reaches_exit(std::int32_t c) const { return exit_reach_[c] != 0; }
  // Cells that cannot reach the exit sink.
  CellSet bounded() const;
  // Cells that never reach the exit and whose reachable recurrent cells all
  // lie in A (the graph basin of A).
  CellSet basin(const CellSet& A) const;
  // Cells all of whose paths stay inside U.
  CellSet trapped_in(const CellSet& U) const;

 private:
  const TransitionGraph* g_;
  TransitionGraph rev_;
  SccResult scc_;
  Mask exit_reach_;
};

// Recurrent cells reachable from S together with the cells on paths between
// them; errors with not_attracted when S reaches the exit sink.
CellSet omega_limit(const GraphAnalysis& ga, const CellSet& S);
CellSet omega_limit(const TransitionGraph& g, const CellSet& S);

struct AttractorReport {
  CellSet attractor;
  CellSet basin;
  CellSet relative_basin;  // basin cells whose whole forward orbit stays in U
  CellSet dual_repeller;   // relative to the global attractor of the graph
};

// Attractor ω(U) of an eventually self-absorbing U; errors with
// no_attractor_certificate when U is not absorbed into itself.
AttractorReport find_attractor(const GraphAnalysis& ga, const CellSet& U);
AttractorReport find_attractor(const TransitionGraph& g, const CellSet& U);

// Global attractor: ω of every cell that cannot reach the exit sink.
CellSet global_attractor(const GraphAnalysis& ga);

// 𝔄 minus the basin of A; errors when A is not inside 𝔄.
CellSet dual_repeller(const GraphAnalysis& ga, const CellSet& A, const CellSet& global);
CellSet dual_repeller(const TransitionGraph& g, const CellSet& A, const CellSet& global);

struct MorseDecomposition {
  CellSet region;                  // the global attractor 𝔄
  std::vector<CellSet> sets;       // M_1 … M_l
  std::vector<CellSet> attractors; // A_0 = ∅ … A_l
  // (i, j) with 1 <= j < i <= l whenever M_j is reachable from M_i.
  std::vector<std::pair<int, int>> order;
  // Per graph cell: smallest k with the cell in the basin of A_k, or -1.
  std::vector<int> basin_index;
  // Per graph cell: k when the cell lies in M_k, else 0.
  std::vector<int> morse_index;
  std::vector<Vec> hull_lo, hull_hi;  // state-space hulls of M_k
  int pruned_merges = 0;

  int size() const { return static_cast<int>(sets.size()); }
};

struct PruneOptions {
  std::shared_ptr<const RightHandSide> rhs;  // needed to rebuild refined graphs
  GraphParams params;
  double max_diameter_cells = 2.0;
};

struct MorseOptions {
  std::optional<PruneOptions> prune;
};

MorseDecomposition morse_decomposition(const GraphAnalysis& ga, const CellSet& global,
                                       const MorseOptions& opt = {});
MorseDecomposition morse_decomposition(const TransitionGraph& g, const CellSet& global,
                                       const MorseOptions& opt = {});

// Re-checks disjointness, M_k = A_k ∩ A*_{k-1}, the unstable-manifold identity,
// forward invariance and edge ordering. Throws invariant_violation.
void verify_decomposition(const GraphAnalysis& ga, const MorseDecomposition& d);

// State-space hull of a cell set.
void cell_hull(const CubicalGrid& grid, const CellSet& cells, Vec& lo, Vec& hi);
bool hull_contains(const CubicalGrid& grid, const CellSet& cells, const Vec& x);
// Largest side of the hull, in state units.
double hull_diameter(const CubicalGrid& grid, const CellSet& cells);

std::string decomposition_json(const TransitionGraph& g, const MorseDecomposition& d);
// Inverse of decomposition_json for the graph it was computed on; the
// result is re-verified.
MorseDecomposition decomposition_from_json(const GraphAnalysis& ga, const std::string& text);
std::string decomposition_dot(const TransitionGraph& g, const MorseDecomposition& d);
// Condensation of the whole graph restricted to its recurrent components,
// with an explicit exit node; edges summarize paths through transient cells.
std::string condensation_dot(const GraphAnalysis& ga);

}  // namespace dimorse
