#pragma once

#include "dimorse/grid.hpp"
#include "dimorse/integrator.hpp"
#include "dimorse/selection.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dimorse {

struct SamplingOptions {
  // 0 means the corners and the center of each cell (2^m + 1 points); larger
  // values add seeded uniform interior points up to that count.
  int points_per_cell = 0;
  // Empty means the default trio: closest-to-zero plus two random-convex.
  std::vector<Selection> selections;
  std::uint64_t seed = 0;
};

struct GraphParams {
  double tau = 1.0;
  double h = 0.0;      // 0 means tau / 10
  double rho = -1.0;   // sup-norm bloat; negative means one cell width
  SamplingOptions sampling;
  IntegratorOptions integrator;
};

struct GraphMeta {
  double tau = 0.0;
  double h = 0.0;
  double rho = 0.0;
  double delta = 0.0;  // inflation radius of the right-hand side, if any
  int points_per_cell = 0;
  std::vector<std::string> selections;
  std::uint64_t seed = 0;
};

std::vector<Selection> default_selections(std::uint64_t seed);

// Directed graph on the active cells of a grid (local indices). Cells whose
// sampled images leave the box point to the virtual exit sink, recorded as a
// flag rather than an explicit node.
class TransitionGraph {
 public:
  TransitionGraph() = default;
  TransitionGraph(CubicalGrid grid, GraphMeta meta, std::vector<std::int64_t> offsets,
                  std::vector<std::int32_t> targets, std::vector<std::uint8_t> exits);
  // Builds a graph from explicit adjacency lists (sorted and deduplicated).
  static TransitionGraph from_lists(CubicalGrid grid, GraphMeta meta,
                                    std::vector<std::vector<std::int32_t>> adj,
                                    std::vector<std::uint8_t> exits);

  const CubicalGrid& grid() const { return grid_; }
  const GraphMeta& meta() const { return meta_; }
  std::int32_t size() const { return static_cast<std::int32_t>(exits_.size()); }
  std::size_t edge_count() const { return targets_.size(); }
  std::span<const std::int32_t> successors(std::int32_t c) const {
    return {targets_.data() + offsets_[c], targets_.data() + offsets_[c + 1]};
  }
  bool exits(std::int32_t c) const { return exits_[c] != 0; }
  bool has_edge(std::int32_t a, std::int32_t b) const;

  const std::vector<std::int64_t>& offsets() const { return offsets_; }
  const std::vector<std::int32_t>& targets() const { return targets_; }
  const std::vector<std::uint8_t>& exit_flags() const { return exits_; }

  // Predecessor lists in the same CSR layout.
  TransitionGraph reversed() const;

 private:
  CubicalGrid grid_;
  GraphMeta meta_;
  std::vector<std::int64_t> offsets_;
  std::vector<std::int32_t> targets_;
  std::vector<std::uint8_t> exits_;
};

// Outer approximation of the time-τ reachability relation on the active cells.
TransitionGraph build_graph(std::shared_ptr<const RightHandSide> rhs, const CubicalGrid& grid,
                            const GraphParams& params, double delta = 0.0);
TransitionGraph build_graph(const SetValuedMapSpec& spec, const CubicalGrid& grid,
                            const GraphParams& params);

// Refined grid (depth + 1) on the given local cells.
CubicalGrid subdivide(const TransitionGraph& graph, const std::vector<std::int32_t>& cells);

// One JSON header line followed by the binary CSR payload.
void write_graph(const TransitionGraph& g, const std::string& path);
TransitionGraph read_graph(const std::string& path);

}  // namespace dimorse
