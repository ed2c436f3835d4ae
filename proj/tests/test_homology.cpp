#include <doctest.h>

#include "dimorse/homology.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <map>

using namespace dimorse;

namespace {

CubicalGrid plane(int depth) { return CubicalGrid(Vec::Zero(2), Vec::Ones(2), depth); }

std::vector<std::int32_t> cells_at(const CubicalGrid& g, const std::vector<std::pair<int, int>>& xy) {
  std::vector<std::int32_t> out;
  for (auto [x, y] : xy) out.push_back(static_cast<std::int32_t>(g.index(Coord{x, y, 0, 0})));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::int32_t> random_cells(CounterRng& rng, const CubicalGrid& g, double p) {
  std::vector<std::int32_t> out;
  for (std::int32_t c = 0; c < g.size(); ++c)
    if (rng.uniform() < p) out.push_back(c);
  return out;
}

// Betti numbers of C(X)/C(A) from dense rational boundary ranks:
// β_q = dim C_q − rank ∂_q − rank ∂_{q+1}.
std::vector<int> oracle_ranks(const CubicalComplex& X, const CubicalComplex& A) {
  const int m = X.dim();
  const auto diff = X.difference(A);
  std::vector<std::map<std::int64_t, int>> pos(m + 1);
  for (int q = 0; q <= m; ++q)
    for (std::size_t i = 0; i < diff[q].size(); ++i) pos[q][diff[q][i]] = static_cast<int>(i);
  std::vector<long> rank(m + 2, 0);
  for (int q = 1; q <= m; ++q) {
    if (diff[q].empty() || diff[q - 1].empty()) continue;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<long>(diff[q - 1].size()), static_cast<long>(diff[q].size()));
    for (std::size_t j = 0; j < diff[q].size(); ++j)
      for (const Face& f : cube_boundary(X, diff[q][j])) {
        auto it = pos[q - 1].find(f.key);
        if (it != pos[q - 1].end()) D(it->second, static_cast<long>(j)) += f.sign;
      }
    rank[q] = Eigen::FullPivLU<Eigen::MatrixXd>(D).rank();
  }
  std::vector<int> b(m + 1);
  for (int q = 0; q <= m; ++q) b[q] = static_cast<int>(static_cast<long>(diff[q].size()) - rank[q] - rank[q + 1]);
  return b;
}

CubicalComplex cx(const CubicalGrid& g, const std::vector<std::int32_t>& cells) { return complex_of(g, cells); }

std::vector<std::int32_t> merge(std::vector<std::int32_t> a, const std::vector<std::int32_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

TEST_CASE("one square has four vertices, four edges and one face") {
  const CubicalGrid g = plane(2);
  const CubicalComplex K = cx(g, cells_at(g, {{1, 1}}));
  CHECK(K.count(0) == 4);
  CHECK(K.count(1) == 4);
  CHECK(K.count(2) == 1);
  CHECK(euler_characteristic(K) == 1);
  CHECK(betti(K).ranks == std::vector<int>{1, 0, 0});
}

TEST_CASE("two adjacent squares share an edge") {
  const CubicalGrid g = plane(2);
  const CubicalComplex K = cx(g, cells_at(g, {{1, 1}, {2, 1}}));
  CHECK(K.count(0) == 6);
  CHECK(K.count(1) == 7);
  CHECK(K.count(2) == 2);
}

TEST_CASE("a ring of eight squares has one hole") {
  const CubicalGrid g = plane(2);
  const CubicalComplex K = cx(g, cells_at(g, {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {2, 1}, {0, 2}, {1, 2}, {2, 2}}));
  CHECK(euler_characteristic(K) == 0);
  CHECK(betti(K).ranks == std::vector<int>{1, 1, 0});
  CHECK(betti(K, Coefficients::integer).ranks == std::vector<int>{1, 1, 0});
}

TEST_CASE("a solid cube and a hollow cube") {
  const CubicalGrid g(Vec::Zero(3), Vec::Ones(3), 2);
  CHECK(betti(complex_of(g, {0})).ranks == std::vector<int>{1, 0, 0, 0});
  std::vector<std::int32_t> shell;
  const CubicalGrid& h = g;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int z = 0; z < 3; ++z)
        if (!(x == 1 && y == 1 && z == 1)) shell.push_back(static_cast<std::int32_t>(h.index(Coord{x, y, z, 0})));
  std::sort(shell.begin(), shell.end());
  const BettiVector b = betti(complex_of(h, shell), Coefficients::integer);
  CHECK(b.ranks == std::vector<int>{1, 0, 1, 0});
}

TEST_CASE("empty complexes have no homology") {
  const CubicalGrid g = plane(2);
  const CubicalComplex K = cx(g, {});
  CHECK(K.empty());
  CHECK(betti(K).ranks == std::vector<int>{0, 0, 0});
  CHECK(relative_betti(g, {}, {}).ranks == std::vector<int>{0, 0, 0});
}

TEST_CASE("boundary of a boundary vanishes") {
  const CubicalGrid g(Vec::Zero(3), Vec::Ones(3), 1);
  std::vector<std::int32_t> all(g.size());
  for (std::int32_t c = 0; c < g.size(); ++c) all[c] = c;
  const CubicalComplex K = complex_of(g, all);
  for (int q = 2; q <= 3; ++q)
    for (auto key : K.cubes(q)) {
      std::map<std::int64_t, int> acc;
      for (const Face& f : cube_boundary(K, key))
        for (const Face& h : cube_boundary(K, f.key)) acc[h.key] += f.sign * h.sign;
      for (auto [k, v] : acc) CHECK(v == 0);
    }
}

TEST_CASE("random planar sets agree with the dense rational oracle") {
  CounterRng rng(51, 1);
  const CubicalGrid g = plane(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cells = random_cells(rng, g, 0.3 + 0.02 * trial);
    const CubicalComplex K = cx(g, cells);
    const std::vector<int> want = oracle_ranks(K, CubicalComplex(2, g.per_axis()));
    CHECK(betti(K).ranks == want);
    CHECK(betti(K, Coefficients::integer).ranks == want);
  }
}

TEST_CASE("random relative pairs in three dimensions agree with the oracle") {
  CounterRng rng(51, 2);
  const CubicalGrid g(Vec::Zero(3), Vec::Ones(3), 2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto U = random_cells(rng, g, 0.2);
    const auto W = merge(random_cells(rng, g, 0.4), U);
    const CubicalComplex X = cx(g, W), A = cx(g, U);
    const std::vector<int> want = oracle_ranks(X, A);
    CHECK(relative_betti(g, W, U).ranks == want);
    CHECK(relative_betti(g, W, U, Coefficients::integer).ranks == want);
  }
}

TEST_CASE("a pair with equal members is acyclic") {
  CounterRng rng(51, 3);
  const CubicalGrid g = plane(3);
  const auto W = random_cells(rng, g, 0.5);
  CHECK(relative_betti(g, W, W).ranks == std::vector<int>{0, 0, 0});
}

TEST_CASE("a bar relative to its two ends carries one relative 1-cycle") {
  const CubicalGrid g = plane(3);
  std::vector<std::pair<int, int>> bar, ends = {{0, 3}, {7, 3}};
  for (int x = 0; x < 8; ++x) bar.push_back({x, 3});
  CHECK(relative_betti(g, cells_at(g, bar), cells_at(g, ends)).ranks == std::vector<int>{0, 1, 0});
  CHECK(betti(cx(g, cells_at(g, ends))).ranks == std::vector<int>{2, 0, 0});
}

TEST_CASE("Euler characteristic is additive over nested triples") {
  CounterRng rng(51, 4);
  const CubicalGrid g = plane(3);
  auto chi = [](const BettiVector& b) {
    long s = 0;
    for (std::size_t q = 0; q < b.ranks.size(); ++q) s += (q % 2 ? -1 : 1) * b.ranks[q];
    return s;
  };
  for (int trial = 0; trial < 50; ++trial) {
    const auto A = random_cells(rng, g, 0.15);
    const auto B = merge(random_cells(rng, g, 0.2), A);
    const auto X = merge(random_cells(rng, g, 0.3), B);
    const long xa = chi(relative_betti(g, X, A));
    CHECK(xa == chi(relative_betti(g, X, B)) + chi(relative_betti(g, B, A)));
    CHECK(xa == relative_euler(cx(g, X), cx(g, A)));
    CHECK(euler_characteristic(cx(g, X)) == euler_characteristic(cx(g, A)) + xa);
  }
}

TEST_CASE("excising the interior of the subspace leaves the relative groups unchanged") {
  CounterRng rng(51, 5);
  const CubicalGrid g = plane(4);
  for (int trial = 0; trial < 10; ++trial) {
    // A is a block, X adds random cells around it.
    std::vector<std::pair<int, int>> block;
    for (int x = 4; x < 12; ++x)
      for (int y = 4; y < 12; ++y) block.push_back({x, y});
    const auto A = cells_at(g, block);
    const auto X = merge(random_cells(rng, g, 0.4), A);
    // Cells at least two cells inside the block are excisable.
    std::vector<std::pair<int, int>> inner;
    for (int x = 6; x < 10; ++x)
      for (int y = 6; y < 10; ++y) inner.push_back({x, y});
    const auto I = cells_at(g, inner);
    std::vector<std::int32_t> Xe, Ae;
    std::set_difference(X.begin(), X.end(), I.begin(), I.end(), std::back_inserter(Xe));
    std::set_difference(A.begin(), A.end(), I.begin(), I.end(), std::back_inserter(Ae));
    CHECK(relative_betti(g, X, A).ranks == relative_betti(g, Xe, Ae).ranks);
  }
}

TEST_CASE("Betti numbers never exceed the cube counts") {
  CounterRng rng(51, 6);
  const CubicalGrid g(Vec::Zero(3), Vec::Ones(3), 2);
  for (int trial = 0; trial < 10; ++trial) {
    const CubicalComplex K = cx(g, random_cells(rng, g, 0.5));
    const BettiVector b = betti(K);
    for (int q = 0; q <= 3; ++q) CHECK(b[q] <= static_cast<int>(K.count(q)));
  }
}

TEST_CASE("relative homology requires a subcomplex") {
  const CubicalGrid g = plane(2);
  CHECK_THROWS_AS(relative_homology(cx(g, cells_at(g, {{0, 0}})), cx(g, cells_at(g, {{3, 3}}))), Error);
}

TEST_CASE("Smith normal form diagonals") {
  CHECK(smith_diagonal({{2, 0}, {0, 3}}) == std::vector<long>{1, 6});
  CHECK(smith_diagonal({{2, 4}, {4, 2}}) == std::vector<long>{2, 6});
  CHECK(smith_diagonal({{0, 0}, {0, 0}}).empty());
  CHECK(smith_diagonal({{1, 2, 3}, {2, 4, 6}}) == std::vector<long>{1});
  CHECK(smith_diagonal({{2}}) == std::vector<long>{2});
}

TEST_CASE("GF(2) rank matches dense elimination") {
  CounterRng rng(51, 7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 1 + rng.below(90), cols = 1 + rng.below(150);
    const std::size_t words = (cols + 63) / 64;
    std::vector<std::vector<std::uint64_t>> packed(rows, std::vector<std::uint64_t>(words, 0));
    std::vector<std::vector<int>> dense(rows, std::vector<int>(cols, 0));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        if (rng.uniform() < 0.1) {
          dense[r][c] = 1;
          packed[r][c / 64] |= std::uint64_t{1} << (c % 64);
        }
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
      std::size_t p = rank;
      while (p < rows && !dense[p][c]) ++p;
      if (p == rows) continue;
      std::swap(dense[p], dense[rank]);
      for (std::size_t r = 0; r < rows; ++r)
        if (r != rank && dense[r][c])
          for (std::size_t k = 0; k < cols; ++k) dense[r][k] ^= dense[rank][k];
      ++rank;
    }
    CHECK(gf2_rank(packed, cols) == rank);
  }
}

TEST_CASE("coefficient names round-trip") {
  CHECK(parse_coefficients("Z") == Coefficients::integer);
  CHECK(parse_coefficients("Z2") == Coefficients::z2);
  CHECK(std::string(coefficients_name(Coefficients::integer)) == "Z");
  CHECK_THROWS_AS(parse_coefficients("Q"), Error);
}
