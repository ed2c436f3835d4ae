#pragma once

#include "dimorse/transition_graph.hpp"

#include <vector>

namespace dimorse {

// Sorted, duplicate-free list of local cell indices.
using CellSet = std::vector<std::int32_t>;
using Mask = std::vector<std::uint8_t>;

Mask to_mask(const CellSet& s, std::int32_t n);
CellSet from_mask(const Mask& m);
CellSet set_union(const CellSet& a, const CellSet& b);
CellSet set_intersection(const CellSet& a, const CellSet& b);
CellSet set_difference(const CellSet& a, const CellSet& b);
bool is_subset(const CellSet& a, const CellSet& b);

struct SccResult {
  std::vector<std::int32_t> component;  // per node, -1 outside the mask
  std::int32_t count = 0;
  // Components in the order Tarjan emits them: every edge between distinct
  // components goes from a later to an earlier entry (sinks first).
  std::vector<CellSet> members;
  std::vector<std::uint8_t> recurrent;  // >= 2 cells, or a self-loop
};

// Iterative Tarjan on the subgraph induced by `mask` (all nodes when null).
SccResult strongly_connected(const TransitionGraph& g, const Mask* mask = nullptr);

// Nodes reachable from the seeds (seeds included) without leaving the mask.
Mask forward_reach(const TransitionGraph& g, const CellSet& seeds, const Mask* mask = nullptr);
// Nodes that reach the seeds; `rev` must be g.reversed().
Mask backward_reach(const TransitionGraph& rev, const CellSet& seeds, const Mask* mask = nullptr);

// Nodes from which some path reaches a cell with the exit flag.
Mask reaches_exit(const TransitionGraph& g, const TransitionGraph& rev);

// Union of the images of a cell set, and whether any member exits.
CellSet image(const TransitionGraph& g, const CellSet& s, bool* exits = nullptr);

}  // namespace dimorse
