#include "dimorse/cubical.hpp"

#include <algorithm>

namespace dimorse {

CubicalComplex::CubicalComplex(int m, std::int64_t per_axis) : m_(m), n_(per_axis), cubes_(m + 1) {
  if (m < 1 || m > kMaxGridDim) fail(ErrorCode::config, "cubical complexes support dimensions 1 to 4");
  const std::int64_t side = 2 * per_axis + 1;
  base_ = 1;
  for (int i = 0; i < m; ++i) {
    if (base_ > (std::int64_t{1} << 62) / side) fail(ErrorCode::config, "grid too fine for cube keys");
    base_ *= side;
  }
}

std::size_t CubicalComplex::total() const {
  std::size_t t = 0;
  for (const auto& v : cubes_) t += v.size();
  return t;
}

Coord CubicalComplex::decode(std::int64_t key) const {
  const std::int64_t side = 2 * n_ + 1;
  Coord c{};
  for (int i = 0; i < m_; ++i) {
    c[i] = key % side;
    key /= side;
  }
  return c;
}

std::int64_t CubicalComplex::encode(const Coord& c) const {
  const std::int64_t side = 2 * n_ + 1;
  std::int64_t k = 0;
  for (int i = m_ - 1; i >= 0; --i) k = k * side + c[i];
  return k;
}

int CubicalComplex::cube_dim(std::int64_t key) const {
  Coord c = decode(key);
  int q = 0;
  for (int i = 0; i < m_; ++i) q += static_cast<int>(c[i] & 1);
  return q;
}

bool CubicalComplex::contains(std::int64_t key) const {
  const auto& v = cubes_[cube_dim(key)];
  return std::binary_search(v.begin(), v.end(), key);
}

CubicalComplex CubicalComplex::of_cells(const CubicalGrid& grid, const std::vector<std::int64_t>& globals) {
  const int m = grid.dim();
  CubicalComplex K(m, grid.per_axis());
  int pow3 = 1;
  for (int i = 0; i < m; ++i) pow3 *= 3;
  for (auto g : globals) {
    const Coord c = grid.coords(g);
    for (int f = 0; f < pow3; ++f) {
      Coord d{};
      int r = f, q = 0;
      for (int i = 0; i < m; ++i) {
        int o = r % 3;
        r /= 3;
        d[i] = 2 * c[i] + o;  // o = 1 keeps the interval, 0 and 2 its ends
        q += o == 1;
      }
      K.cubes_[q].push_back(K.encode(d));
    }
  }
  for (auto& v : K.cubes_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return K;
}

std::vector<std::vector<std::int64_t>> CubicalComplex::difference(const CubicalComplex& sub) const {
  std::vector<std::vector<std::int64_t>> out(m_ + 1);
  for (int q = 0; q <= m_; ++q)
    std::set_difference(cubes_[q].begin(), cubes_[q].end(), sub.cubes(q).begin(), sub.cubes(q).end(),
                        std::back_inserter(out[q]));
  return out;
}

bool CubicalComplex::is_subcomplex_of(const CubicalComplex& other) const {
  if (other.m_ != m_ || other.n_ != n_) return false;
  for (int q = 0; q <= m_; ++q)
    if (!std::includes(other.cubes_[q].begin(), other.cubes_[q].end(), cubes_[q].begin(), cubes_[q].end()))
      return false;
  return true;
}

std::vector<Face> cube_boundary(const CubicalComplex& K, std::int64_t key) {
  std::vector<Face> out;
  Coord c = K.decode(key);
  int sigma = 0;
  for (int j = 0; j < K.dim(); ++j) {
    if (!(c[j] & 1)) continue;
    const int s = sigma % 2 == 0 ? 1 : -1;
    Coord up = c, down = c;
    up[j] += 1;
    down[j] -= 1;
    out.push_back({K.encode(up), s});
    out.push_back({K.encode(down), -s});
    ++sigma;
  }
  return out;
}

CubicalComplex complex_of(const CubicalGrid& grid, const std::vector<std::int32_t>& cells) {
  std::vector<std::int64_t> globals;
  globals.reserve(cells.size());
  for (auto c : cells) {
    if (c < 0 || c >= grid.size()) fail(ErrorCode::invalid_argument, "cell index outside the grid");
    globals.push_back(grid.global_of(c));
  }
  return CubicalComplex::of_cells(grid, globals);
}

long euler_characteristic(const CubicalComplex& K) {
  long chi = 0;
  for (int q = 0; q <= K.dim(); ++q) chi += (q % 2 ? -1L : 1L) * static_cast<long>(K.count(q));
  return chi;
}

long relative_euler(const CubicalComplex& X, const CubicalComplex& A) {
  return euler_characteristic(X) - euler_characteristic(A);
}

}  // namespace dimorse
