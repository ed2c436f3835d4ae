#pragma once

#include "dimorse/common.hpp"

#include <array>
#include <vector>

namespace dimorse {

constexpr int kMaxGridDim = 4;
using Coord = std::array<std::int64_t, kMaxGridDim>;

// Uniform cubical grid of 2^depth cells per axis on an axis-aligned box,
// optionally restricted to an active subset of its cells. Cells have a global
// index (row-major over the full grid, axis 0 fastest) and a local index
// (position among the active cells, ascending in global index).
class CubicalGrid {
 public:
  CubicalGrid() = default;
  CubicalGrid(Vec lo, Vec hi, int depth);

  int dim() const { return static_cast<int>(lo_.size()); }
  int depth() const { return depth_; }
  std::int64_t per_axis() const { return n_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const Vec& width() const { return w_; }
  double max_width() const { return w_.maxCoeff(); }

  std::int64_t total_cells() const { return total_; }
  bool restricted() const { return !active_.empty() || restricted_empty_; }
  // Number of active cells.
  std::int64_t size() const { return restricted() ? static_cast<std::int64_t>(active_.size()) : total_; }
  std::int64_t global_of(std::int64_t local) const { return restricted() ? active_[local] : local; }
  // Local index of a global cell, or -1 when it is not active.
  std::int64_t local_of(std::int64_t global) const;
  const std::vector<std::int64_t>& active_cells() const { return active_; }

  Coord coords(std::int64_t global) const;
  std::int64_t index(const Coord& c) const;
  bool in_range(const Coord& c) const;

  Vec cell_lo(std::int64_t global) const;
  Vec cell_hi(std::int64_t global) const;
  Vec center(std::int64_t global) const;

  bool inside(const Vec& x) const;
  // Global cell containing x (upper box faces belong to the last cell), or -1.
  std::int64_t locate(const Vec& x) const;

  // Same box and depth, active set given by global indices.
  CubicalGrid restricted_to(std::vector<std::int64_t> globals) const;
  // Depth + 1, active set = the 2^m children of the listed local cells.
  CubicalGrid subdivide(const std::vector<std::int64_t>& locals) const;

 private:
  Vec lo_, hi_, w_;
  int depth_ = 0;
  std::int64_t n_ = 0;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> active_;
  bool restricted_empty_ = false;
};

}  // namespace dimorse
