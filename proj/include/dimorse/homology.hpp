#pragma once

#include "dimorse/cubical.hpp"

#include <string>
#include <vector>

namespace dimorse {

enum class Coefficients { z2, integer };

const char* coefficients_name(Coefficients c);
Coefficients parse_coefficients(const std::string& s);

struct BettiVector {
  std::vector<int> ranks;  // β_0 … β_m
  Coefficients coefficients = Coefficients::z2;
  // Integer mode only: invariant factors > 1 of H_q, per degree.
  std::vector<std::vector<long>> torsion;

  int operator[](int q) const { return q < static_cast<int>(ranks.size()) ? ranks[q] : 0; }
  bool has_torsion() const;
  bool operator==(const BettiVector& o) const { return ranks == o.ranks; }
};

// Homology of a closed complex.
BettiVector betti(const CubicalComplex& K, Coefficients coeff = Coefficients::z2);
// Homology of the pair (X, A); A must be a subcomplex of X.
BettiVector relative_homology(const CubicalComplex& X, const CubicalComplex& A,
                              Coefficients coeff = Coefficients::z2);
// H_*(W, U) for local cell sets U ⊆ W of one grid.
BettiVector relative_betti(const CubicalGrid& grid, const std::vector<std::int32_t>& W,
                           const std::vector<std::int32_t>& U, Coefficients coeff = Coefficients::z2);

// Rank of a dense 0/1 matrix over Z/2 (rows of packed 64-bit words).
std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> rows, std::size_t cols);

// Smith normal form diagonal (nonzero entries, ascending divisibility) of a
// dense integer matrix. Raises resolution when entries overflow 62 bits.
std::vector<long> smith_diagonal(std::vector<std::vector<long>> a);

}  // namespace dimorse
