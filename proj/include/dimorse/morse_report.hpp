#pragma once

#include "dimorse/homology.hpp"

#include <string>
#include <vector>

namespace dimorse {

struct MorseReport {
  Coefficients coefficients = Coefficients::z2;
  std::vector<BettiVector> critical_groups;  // C_*(M_k), k = 1..l
  std::vector<long> type_numbers;            // 𝔪_q
  BettiVector betti;                         // β_q of the analysis region
  std::vector<long> Q;                       // γ_0 … γ_{m-1}
  long remainder = 0;                        // of (M - P) / (1 + t)
  std::vector<bool> inequalities;            // per q, the partial alternating sums
  bool inequalities_pass = false;
  bool equation_pass = false;
  bool torsion_detected = false;
};

// Assembles type numbers, Morse inequalities, the Euler relation and the
// quotient Q from per-set critical groups and the region's Betti numbers.
MorseReport morse_report(const std::vector<BettiVector>& critical_groups, const BettiVector& region_betti);

// Quotient by (1 + t) of the polynomial with coefficients d (constant term
// first). Returns the quotient and stores the remainder.
std::vector<long> divide_by_one_plus_t(const std::vector<long>& d, long& remainder);

std::string morse_report_json(const MorseReport& r);
// One row per Morse set: k, then the ranks C_0 … C_m.
std::string morse_report_csv(const MorseReport& r);

}  // namespace dimorse
