#include "dimorse/grid.hpp"

#include <algorithm>
#include <cmath>

namespace dimorse {

CubicalGrid::CubicalGrid(Vec lo, Vec hi, int depth) : lo_(std::move(lo)), hi_(std::move(hi)), depth_(depth) {
  if (lo_.size() != hi_.size() || lo_.size() == 0)
    fail(ErrorCode::dimension_mismatch, "grid box bounds have inconsistent dimensions");
  if (lo_.size() > kMaxGridDim) fail(ErrorCode::config, "grid dimension above 4 is not supported");
  if (depth < 0 || depth > 20) fail(ErrorCode::config, "grid depth must lie in [0, 20]");
  for (int i = 0; i < dim(); ++i)
    if (!(hi_[i] > lo_[i]) || !std::isfinite(lo_[i]) || !std::isfinite(hi_[i]))
      fail(ErrorCode::config, "grid box must be nonempty and finite");
  n_ = std::int64_t{1} << depth;
  total_ = 1;
  for (int i = 0; i < dim(); ++i) {
    if (total_ > (std::int64_t{1} << 40) / n_) fail(ErrorCode::config, "grid has too many cells");
    total_ *= n_;
  }
  w_ = (hi_ - lo_) / static_cast<double>(n_);
}

std::int64_t CubicalGrid::local_of(std::int64_t global) const {
  if (global < 0 || global >= total_) return -1;
  if (!restricted()) return global;
  auto it = std::lower_bound(active_.begin(), active_.end(), global);
  return it != active_.end() && *it == global ? it - active_.begin() : -1;
}

Coord CubicalGrid::coords(std::int64_t g) const {
  Coord c{};
  for (int i = 0; i < dim(); ++i) {
    c[i] = g % n_;
    g /= n_;
  }
  return c;
}

std::int64_t CubicalGrid::index(const Coord& c) const {
  std::int64_t g = 0;
  for (int i = dim() - 1; i >= 0; --i) g = g * n_ + c[i];
  return g;
}

bool CubicalGrid::in_range(const Coord& c) const {
  for (int i = 0; i < dim(); ++i)
    if (c[i] < 0 || c[i] >= n_) return false;
  return true;
}

Vec CubicalGrid::cell_lo(std::int64_t g) const {
  Coord c = coords(g);
  Vec v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = lo_[i] + static_cast<double>(c[i]) * w_[i];
  return v;
}

Vec CubicalGrid::cell_hi(std::int64_t g) const {
  Coord c = coords(g);
  Vec v(dim());
  for (int i = 0; i < dim(); ++i)
    v[i] = c[i] + 1 == n_ ? hi_[i] : lo_[i] + static_cast<double>(c[i] + 1) * w_[i];
  return v;
}

Vec CubicalGrid::center(std::int64_t g) const { return 0.5 * (cell_lo(g) + cell_hi(g)); }

bool CubicalGrid::inside(const Vec& x) const {
  for (int i = 0; i < dim(); ++i)
    if (!(x[i] >= lo_[i] && x[i] <= hi_[i])) return false;
  return true;
}

std::int64_t CubicalGrid::locate(const Vec& x) const {
  if (x.size() != dim()) fail(ErrorCode::dimension_mismatch, "point has wrong dimension");
  if (!inside(x)) return -1;
  Coord c{};
  for (int i = 0; i < dim(); ++i)
    c[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((x[i] - lo_[i]) / w_[i])), 0, n_ - 1);
  return index(c);
}

CubicalGrid CubicalGrid::restricted_to(std::vector<std::int64_t> globals) const {
  std::sort(globals.begin(), globals.end());
  globals.erase(std::unique(globals.begin(), globals.end()), globals.end());
  for (auto g : globals)
    if (g < 0 || g >= total_) fail(ErrorCode::invalid_argument, "cell index outside the grid");
  CubicalGrid out = *this;
  out.active_ = std::move(globals);
  out.restricted_empty_ = out.active_.empty();
  return out;
}

CubicalGrid CubicalGrid::subdivide(const std::vector<std::int64_t>& locals) const {
  if (locals.empty()) fail(ErrorCode::invalid_argument, "cannot subdivide an empty cell set");
  CubicalGrid fine(lo_, hi_, depth_ + 1);
  std::vector<std::int64_t> kids;
  kids.reserve(locals.size() << dim());
  for (auto l : locals) {
    if (l < 0 || l >= size()) fail(ErrorCode::invalid_argument, "cell index outside the grid");
    Coord c = coords(global_of(l));
    for (int mask = 0; mask < (1 << dim()); ++mask) {
      Coord k{};
      for (int i = 0; i < dim(); ++i) k[i] = 2 * c[i] + ((mask >> i) & 1);
      kids.push_back(fine.index(k));
    }
  }
  return fine.restricted_to(std::move(kids));
}

}  // namespace dimorse
