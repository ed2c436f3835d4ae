#include "dimorse/homology.hpp"

#include "dimorse/kernels/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace dimorse {

const char* coefficients_name(Coefficients c) { return c == Coefficients::z2 ? "Z2" : "Z"; }

Coefficients parse_coefficients(const std::string& s) {
  if (s == "Z2" || s == "z2" || s == "GF2" || s == "mod2") return Coefficients::z2;
  if (s == "Z" || s == "integer" || s == "integers") return Coefficients::integer;
  fail(ErrorCode::config, "unknown coefficient system '" + s + "'");
}

bool BettiVector::has_torsion() const {
  for (const auto& t : torsion)
    if (!t.empty()) return true;
  return false;
}

std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> rows, std::size_t cols) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows.size(); ++col) {
    const std::size_t w = col >> 6;
    const std::uint64_t bit = std::uint64_t{1} << (col & 63);
    std::size_t piv = rank;
    while (piv < rows.size() && !(rows[piv][w] & bit)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    const std::size_t words = rows[rank].size();
    for (std::size_t r = rank + 1; r < rows.size(); ++r)
      if (rows[r][w] & bit) kernels::xor_words(rows[r].data() + w, rows[rank].data() + w, words - w);
    ++rank;
  }
  return rank;
}

namespace {

long checked(__int128 v) {
  if (v > (__int128{1} << 62) || v < -(__int128{1} << 62))
    fail(ErrorCode::resolution, "integer normal form overflowed; use Z2 coefficients");
  return static_cast<long>(v);
}

// Replaces pairs (d_i, d_j) by (gcd, lcm) until each entry divides the next.
std::vector<long> normalize_divisors(std::vector<long> d) {
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      long g = std::gcd(d[i], d[j]);
      long l = checked(static_cast<__int128>(d[i] / g) * d[j]);
      d[i] = g;
      d[j] = l;
    }
  return d;
}

}  // namespace

std::vector<long> smith_diagonal(std::vector<std::vector<long>> a) {
  const std::size_t R = a.size();
  const std::size_t C = R ? a[0].size() : 0;
  std::vector<long> diag;
  for (std::size_t t = 0; t < std::min(R, C); ++t) {
    for (;;) {
      // Pivot: smallest nonzero magnitude in the remaining block.
      std::size_t pi = R, pj = C;
      long best = 0;
      for (std::size_t i = t; i < R; ++i)
        for (std::size_t j = t; j < C; ++j)
          if (a[i][j] != 0 && (best == 0 || std::labs(a[i][j]) < best)) {
            best = std::labs(a[i][j]);
            pi = i;
            pj = j;
          }
      if (pi == R) return normalize_divisors(std::move(diag));
      std::swap(a[t], a[pi]);
      for (auto& row : a) std::swap(row[t], row[pj]);
      bool clean = true;
      const long p = a[t][t];
      for (std::size_t i = t + 1; i < R; ++i) {
        if (a[i][t] == 0) continue;
        const long q = a[i][t] / p;
        for (std::size_t j = t; j < C; ++j) a[i][j] = checked(a[i][j] - static_cast<__int128>(q) * a[t][j]);
        if (a[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        if (a[t][j] == 0) continue;
        const long q = a[t][j] / p;
        for (std::size_t i = t; i < R; ++i) a[i][j] = checked(a[i][j] - static_cast<__int128>(q) * a[i][t]);
        if (a[t][j] != 0) clean = false;
      }
      if (clean) break;
    }
    diag.push_back(std::labs(a[t][t]));
  }
  return normalize_divisors(std::move(diag));
}

namespace {

struct Entry {
  std::int32_t cell;
  int coef;
};

// Chain complex of the pair (X, A) on the cubes of X not in A, reduced in
// place by fill-in-free elementary reductions.
struct ChainComplex {
  int m = 0;
  std::vector<int> dim;
  std::vector<std::int64_t> key;
  std::vector<std::vector<Entry>> bd, cobd;
  std::vector<char> alive;
  std::vector<int> bcount, cocount;
  int extra_h0 = 0;

  void remove(std::int32_t c);
  void reduce();
};

void ChainComplex::remove(std::int32_t c) {
  alive[c] = 0;
  for (const auto& e : bd[c])
    if (alive[e.cell]) --cocount[e.cell];
  for (const auto& e : cobd[c])
    if (alive[e.cell]) --bcount[e.cell];
}

void ChainComplex::reduce() {
  const std::int32_t n = static_cast<std::int32_t>(dim.size());
  std::vector<std::int32_t> work(n);
  std::iota(work.begin(), work.end(), 0);
  std::vector<char> queued(n, 1);
  auto push = [&](std::int32_t c) {
    if (alive[c] && !queued[c]) {
      queued[c] = 1;
      work.push_back(c);
    }
  };
  auto neighbors = [&](std::int32_t c) {
    for (const auto& e : bd[c]) push(e.cell);
    for (const auto& e : cobd[c]) push(e.cell);
  };
  while (!work.empty()) {
    std::int32_t c = work.back();
    work.pop_back();
    queued[c] = 0;
    if (!alive[c]) continue;
    std::int32_t partner = -1;
    if (bcount[c] == 1) {
      // Coreduction: c has a single remaining face.
      for (const auto& e : bd[c])
        if (alive[e.cell]) {
          if (std::abs(e.coef) == 1) partner = e.cell;
          break;
        }
    }
    if (partner < 0 && cocount[c] == 1) {
      // Free face: c has a single remaining coface.
      for (const auto& e : cobd[c])
        if (alive[e.cell]) {
          if (std::abs(e.coef) == 1) partner = e.cell;
          break;
        }
    }
    if (partner < 0) continue;
    remove(c);
    remove(partner);
    neighbors(c);
    neighbors(partner);
  }
}

ChainComplex build_chain_complex(const CubicalComplex& X, const CubicalComplex& A) {
  ChainComplex cc;
  cc.m = X.dim();
  auto rel = X.difference(A);
  std::vector<std::int32_t> first(cc.m + 2, 0);
  for (int q = 0; q <= cc.m; ++q) first[q + 1] = first[q] + static_cast<std::int32_t>(rel[q].size());
  const std::int32_t n = first[cc.m + 1];
  cc.dim.resize(n);
  cc.key.resize(n);
  cc.bd.resize(n);
  cc.cobd.resize(n);
  cc.alive.assign(n, 1);
  cc.bcount.assign(n, 0);
  cc.cocount.assign(n, 0);
  auto index_of = [&](std::int64_t key, int q) -> std::int32_t {
    auto it = std::lower_bound(rel[q].begin(), rel[q].end(), key);
    if (it == rel[q].end() || *it != key) return -1;
    return first[q] + static_cast<std::int32_t>(it - rel[q].begin());
  };
  for (int q = 0; q <= cc.m; ++q)
    for (std::size_t k = 0; k < rel[q].size(); ++k) {
      const std::int32_t c = first[q] + static_cast<std::int32_t>(k);
      cc.dim[c] = q;
      cc.key[c] = rel[q][k];
      if (q == 0) continue;
      for (const Face& f : cube_boundary(X, rel[q][k])) {
        std::int32_t fi = index_of(f.key, q - 1);
        if (fi < 0) continue;  // face lies in A
        cc.bd[c].push_back({fi, f.sign});
        cc.cobd[fi].push_back({c, f.sign});
      }
    }
  for (std::int32_t c = 0; c < n; ++c) {
    cc.bcount[c] = static_cast<int>(cc.bd[c].size());
    cc.cocount[c] = static_cast<int>(cc.cobd[c].size());
  }

  // Components of X that miss A contribute one H_0 generator each: remove
  // one vertex per such component, which turns its homology into the
  // reduced homology.
  std::vector<std::int32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::int32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<char> touches_a(n, 0);
  for (std::int32_t c = 0; c < n; ++c) {
    for (const auto& e : cc.bd[c]) {
      std::int32_t a = find(c), b = find(e.cell);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    if (cc.dim[c] > 0 && static_cast<int>(cc.bd[c].size()) < 2 * cc.dim[c]) touches_a[c] = 1;
  }
  std::vector<char> comp_touch(n, 0), comp_done(n, 0);
  for (std::int32_t c = 0; c < n; ++c)
    if (touches_a[c]) comp_touch[find(c)] = 1;
  for (std::int32_t c = first[0]; c < first[1]; ++c) {
    std::int32_t r = find(c);
    if (comp_touch[r] || comp_done[r]) continue;
    comp_done[r] = 1;
    cc.remove(c);
    ++cc.extra_h0;
  }
  return cc;
}

}  // namespace

BettiVector relative_homology(const CubicalComplex& X, const CubicalComplex& A, Coefficients coeff) {
  if (!A.is_subcomplex_of(X)) fail(ErrorCode::invalid_argument, "relative homology needs A inside X");
  BettiVector out;
  out.coefficients = coeff;
  const int m = X.dim();
  out.ranks.assign(m + 1, 0);
  out.torsion.assign(m + 1, {});
  ChainComplex cc = build_chain_complex(X, A);
  cc.reduce();

  std::vector<std::vector<std::int32_t>> cells(m + 1);
  for (std::size_t c = 0; c < cc.dim.size(); ++c)
    if (cc.alive[c]) cells[cc.dim[c]].push_back(static_cast<std::int32_t>(c));
  std::vector<std::int32_t> pos(cc.dim.size(), -1);
  for (int q = 0; q <= m; ++q)
    for (std::size_t k = 0; k < cells[q].size(); ++k) pos[cells[q][k]] = static_cast<std::int32_t>(k);

  // rank of ∂_q : C_q → C_{q-1}
  std::vector<std::size_t> rank(m + 2, 0);
  std::vector<std::vector<long>> divisors(m + 2);
  for (int q = 1; q <= m; ++q) {
    const std::size_t rows = cells[q - 1].size(), cols = cells[q].size();
    if (rows == 0 || cols == 0) continue;
    if (coeff == Coefficients::z2) {
      const std::size_t words = (rows + 63) / 64;
      std::vector<std::vector<std::uint64_t>> mat(cols, std::vector<std::uint64_t>(words, 0));
      for (std::size_t k = 0; k < cols; ++k)
        for (const auto& e : cc.bd[cells[q][k]])
          if (cc.alive[e.cell] && (e.coef & 1)) {
            std::size_t r = static_cast<std::size_t>(pos[e.cell]);
            mat[k][r >> 6] ^= std::uint64_t{1} << (r & 63);
          }
      rank[q] = gf2_rank(std::move(mat), rows);
    } else {
      std::vector<std::vector<long>> mat(rows, std::vector<long>(cols, 0));
      for (std::size_t k = 0; k < cols; ++k)
        for (const auto& e : cc.bd[cells[q][k]])
          if (cc.alive[e.cell]) mat[pos[e.cell]][k] += e.coef;
      divisors[q] = smith_diagonal(std::move(mat));
      rank[q] = divisors[q].size();
    }
  }
  for (int q = 0; q <= m; ++q) {
    long b = static_cast<long>(cells[q].size()) - static_cast<long>(rank[q]) - static_cast<long>(rank[q + 1]);
    if (q == 0) b += cc.extra_h0;
    out.ranks[q] = static_cast<int>(b);
    for (long d : divisors[q + 1])
      if (d > 1) out.torsion[q].push_back(d);
  }
  return out;
}

BettiVector betti(const CubicalComplex& K, Coefficients coeff) {
  CubicalComplex empty(K.dim(), K.per_axis());
  return relative_homology(K, empty, coeff);
}

BettiVector relative_betti(const CubicalGrid& grid, const std::vector<std::int32_t>& W,
                           const std::vector<std::int32_t>& U, Coefficients coeff) {
  std::vector<std::int32_t> w(W), u(U);
  std::sort(w.begin(), w.end());
  std::sort(u.begin(), u.end());
  if (!std::includes(w.begin(), w.end(), u.begin(), u.end()))
    fail(ErrorCode::invalid_argument, "relative homology needs U inside W");
  return relative_homology(complex_of(grid, w), complex_of(grid, u), coeff);
}

}  // namespace dimorse
