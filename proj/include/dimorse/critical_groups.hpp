#pragma once

#include "dimorse/homology.hpp"
#include "dimorse/lyapunov.hpp"

namespace dimorse {

// All active cells within r cells of S in the max-norm (diagonals included).
CellSet dilate(const CubicalGrid& grid, const CellSet& S, int r);

// Absorbing-set iteration around an attractor A: the basin cells all of
// whose graph paths enter A within r steps. The result is forward invariant,
// contains A and grows with r up to the whole basin. Empty A yields the
// empty neighborhood.
CellSet attractor_neighborhood(const GraphAnalysis& ga, const CellSet& A, int r);

struct CriticalGroupOptions {
  Coefficients coefficients = Coefficients::z2;
  int ring = 1;       // first absorption depth tried
  int max_ring = 12;  // the search gives up beyond this depth
};

struct CriticalGroupResult {
  BettiVector ranks;
  BettiVector second;  // ranks from the larger neighborhood pair
  int ring = 0;  // absorption depth of the first pair; the second is larger
  std::size_t w_cells = 0, u_cells = 0;
  std::size_t w2_cells = 0, u2_cells = 0;
};

// C_*(M_k) = H_*(W, U) with W ⊇ A_k and U ⊇ A_{k-1} forward-invariant
// neighborhoods of absorption depth r, compared against the next strictly
// larger pair. Starting at opt.ring, r grows until the two pairs give equal
// ranks; neighborhood_unstable is raised if that never happens up to
// max_ring.
// 1 <= k <= l.
CriticalGroupResult critical_groups(const GraphAnalysis& ga, const MorseDecomposition& d, int k,
                                    const CriticalGroupOptions& opt = {});

// H_*(V_b, V_a) for the sublevel sets of a graph Lyapunov function. Exactly
// one Morse level must lie in (a, b), otherwise precondition is raised.
BettiVector critical_groups_levelset(const LyapunovField& f, double a, double b, const CubicalGrid& grid,
                                     Coefficients coeff = Coefficients::z2);

}  // namespace dimorse
