#pragma once

#include "dimorse/grid.hpp"

#include <vector>

namespace dimorse {

// Elementary cubes are addressed on the doubled grid: coordinate 2k is the
// vertex k along an axis, 2k+1 the interval [k, k+1]. A cube's dimension is
// its number of odd coordinates. Keys are row-major over (2n+1)^m.
class CubicalComplex {
 public:
  CubicalComplex() = default;
  CubicalComplex(int m, std::int64_t per_axis);

  int dim() const { return m_; }
  std::int64_t per_axis() const { return n_; }
  // Sorted keys of the q-cubes.
  const std::vector<std::int64_t>& cubes(int q) const { return cubes_[q]; }
  std::size_t count(int q) const { return q >= 0 && q <= m_ ? cubes_[q].size() : 0; }
  std::size_t total() const;
  bool contains(std::int64_t key) const;
  bool empty() const { return total() == 0; }

  Coord decode(std::int64_t key) const;
  std::int64_t encode(const Coord& c) const;
  int cube_dim(std::int64_t key) const;

  // Closed complex of the given grid cells (global indices).
  static CubicalComplex of_cells(const CubicalGrid& grid, const std::vector<std::int64_t>& globals);
  // Cubes of *this not in `sub` (sub must be a subcomplex).
  std::vector<std::vector<std::int64_t>> difference(const CubicalComplex& sub) const;
  bool is_subcomplex_of(const CubicalComplex& other) const;

 private:
  int m_ = 0;
  std::int64_t n_ = 0;
  std::int64_t base_ = 1;
  std::vector<std::vector<std::int64_t>> cubes_;
};

struct Face {
  std::int64_t key;
  int sign;
};

// Oriented boundary of an elementary cube:
// ∂(I_1 × … × I_m) = Σ_j (-1)^{σ_j} (upper_j − lower_j), σ_j = number of
// nondegenerate intervals before axis j.
std::vector<Face> cube_boundary(const CubicalComplex& K, std::int64_t key);

// Complex generated by the local cells of a grid.
CubicalComplex complex_of(const CubicalGrid& grid, const std::vector<std::int32_t>& cells);

long euler_characteristic(const CubicalComplex& K);
// χ(X, A) for a subcomplex A of X.
long relative_euler(const CubicalComplex& X, const CubicalComplex& A);

}  // namespace dimorse
