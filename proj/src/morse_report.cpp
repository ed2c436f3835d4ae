#include "dimorse/morse_report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace dimorse {

std::vector<long> divide_by_one_plus_t(const std::vector<long>& d, long& remainder) {
  if (d.empty()) {
    remainder = 0;
    return {};
  }
  const std::size_t m = d.size() - 1;
  std::vector<long> q(m, 0);
  if (m == 0) {
    remainder = d[0];
    return q;
  }
  q[m - 1] = d[m];
  for (std::size_t j = m - 1; j >= 1; --j) q[j - 1] = d[j] - q[j];
  remainder = d[0] - q[0];
  return q;
}

MorseReport morse_report(const std::vector<BettiVector>& critical_groups, const BettiVector& region_betti) {
  MorseReport r;
  r.critical_groups = critical_groups;
  r.betti = region_betti;
  r.coefficients = region_betti.coefficients;
  std::size_t len = region_betti.ranks.size();
  for (const auto& c : critical_groups) {
    len = std::max(len, c.ranks.size());
    if (c.coefficients != r.coefficients)
      fail(ErrorCode::invalid_argument, "critical groups and region use different coefficients");
    r.torsion_detected = r.torsion_detected || c.has_torsion();
  }
  r.torsion_detected = r.torsion_detected || region_betti.has_torsion();
  len = std::max<std::size_t>(len, 1);
  r.type_numbers.assign(len, 0);
  for (const auto& c : critical_groups)
    for (std::size_t q = 0; q < len; ++q) r.type_numbers[q] += c[static_cast<int>(q)];

  r.inequalities.assign(len, false);
  r.inequalities_pass = true;
  for (std::size_t q = 0; q < len; ++q) {
    long lhs = 0, rhs = 0;
    for (std::size_t j = 0; j <= q; ++j) {
      const long s = (q - j) % 2 ? -1 : 1;
      lhs += s * r.type_numbers[j];
      rhs += s * region_betti[static_cast<int>(j)];
    }
    r.inequalities[q] = lhs >= rhs;
    r.inequalities_pass = r.inequalities_pass && r.inequalities[q];
  }

  std::vector<long> d(len);
  long euler_m = 0, euler_b = 0;
  for (std::size_t q = 0; q < len; ++q) {
    d[q] = r.type_numbers[q] - region_betti[static_cast<int>(q)];
    const long s = q % 2 ? -1 : 1;
    euler_m += s * r.type_numbers[q];
    euler_b += s * region_betti[static_cast<int>(q)];
  }
  r.Q = divide_by_one_plus_t(d, r.remainder);
  const bool nonneg = std::all_of(r.Q.begin(), r.Q.end(), [](long g) { return g >= 0; });
  r.equation_pass = euler_m == euler_b && r.remainder == 0 && nonneg;
  return r;
}

std::string morse_report_json(const MorseReport& r) {
  nlohmann::ordered_json j;
  j["coefficients"] = coefficients_name(r.coefficients);
  j["morse_type_numbers"] = r.type_numbers;
  j["betti"] = r.betti.ranks;
  auto cg = nlohmann::ordered_json::array();
  for (const auto& c : r.critical_groups) cg.push_back(c.ranks);
  j["critical_groups"] = cg;
  j["Q"] = r.Q;
  j["remainder"] = r.remainder;
  j["inequalities"] = r.inequalities;
  j["inequalities_pass"] = r.inequalities_pass;
  j["equation_pass"] = r.equation_pass;
  j["torsion_detected"] = r.torsion_detected;
  if (r.torsion_detected) {
    auto t = nlohmann::ordered_json::array();
    for (const auto& c : r.critical_groups) t.push_back(c.torsion);
    j["critical_group_torsion"] = t;
    j["betti_torsion"] = r.betti.torsion;
  }
  return j.dump(1);
}

std::string morse_report_csv(const MorseReport& r) {
  std::ostringstream os;
  const std::size_t len = r.type_numbers.size();
  os << "k";
  for (std::size_t q = 0; q < len; ++q) os << ",C" << q;
  os << '\n';
  for (std::size_t k = 0; k < r.critical_groups.size(); ++k) {
    os << k + 1;
    for (std::size_t q = 0; q < len; ++q) os << ',' << r.critical_groups[k][static_cast<int>(q)];
    os << '\n';
  }
  return os.str();
}

}  // namespace dimorse
