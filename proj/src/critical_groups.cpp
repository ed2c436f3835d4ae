#include "dimorse/critical_groups.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

namespace dimorse {

CellSet dilate(const CubicalGrid& grid, const CellSet& S, int r) {
  if (r < 0) fail(ErrorCode::invalid_argument, "dilation radius must be nonnegative");
  const int m = grid.dim();
  const int side = 2 * r + 1;
  int offsets = 1;
  for (int i = 0; i < m; ++i) offsets *= side;
  std::vector<std::int32_t> out;
  out.reserve(S.size() * std::min(offsets, 64));
  for (auto c : S) {
    const Coord base = grid.coords(grid.global_of(c));
    for (int o = 0; o < offsets; ++o) {
      Coord q = base;
      int t = o;
      for (int i = 0; i < m; ++i) {
        q[i] += t % side - r;
        t /= side;
      }
      if (!grid.in_range(q)) continue;
      const std::int64_t l = grid.local_of(grid.index(q));
      if (l >= 0) out.push_back(static_cast<std::int32_t>(l));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CellSet attractor_neighborhood(const GraphAnalysis& ga, const CellSet& A, int r) {
  if (r < 0) fail(ErrorCode::invalid_argument, "absorption depth must be nonnegative");
  if (A.empty()) return {};
  const TransitionGraph& g = ga.graph();
  const Mask basin = to_mask(ga.basin(A), g.size());
  const Mask in_a = to_mask(A, g.size());
  for (auto c : A)
    if (!basin[c]) fail(ErrorCode::invalid_argument, "cell set is not an attractor of the graph");
  // Worst-case number of steps before entering A. Outside A the basin holds
  // no recurrent cells, so Tarjan order (sinks first) is a valid schedule.
  std::vector<int> depth(g.size(), -1);
  CellSet out;
  for (const auto& comp : ga.scc().members)
    for (auto c : comp) {
      if (!basin[c]) continue;
      if (in_a[c]) {
        depth[c] = 0;
      } else {
        int d = 0;
        for (auto w : g.successors(c)) d = std::max(d, depth[w]);
        depth[c] = d + 1;
      }
      if (depth[c] <= r) out.push_back(c);
    }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Pair {
  CellSet W, U;
};

Pair pair_for(const GraphAnalysis& ga, const MorseDecomposition& d, int k, int r) {
  Pair p;
  p.U = attractor_neighborhood(ga, d.attractors[k - 1], r);
  p.W = set_union(attractor_neighborhood(ga, d.attractors[k], r), p.U);
  return p;
}

}  // namespace

CriticalGroupResult critical_groups(const GraphAnalysis& ga, const MorseDecomposition& d, int k,
                                    const CriticalGroupOptions& opt) {
  if (k < 1 || k > d.size()) fail(ErrorCode::invalid_argument, "Morse set index out of range");
  if (opt.ring < 0) fail(ErrorCode::invalid_argument, "absorption depth must be nonnegative");
  const CubicalGrid& grid = ga.graph().grid();
  CriticalGroupResult res;
  Pair cur = pair_for(ga, d, k, opt.ring);
  BettiVector cur_ranks = relative_betti(grid, cur.W, cur.U, opt.coefficients);
  for (int r = opt.ring; r < opt.max_ring;) {
    // Next strictly larger pair; a saturated pair (both sets filling their
    // basins) stays equal and is compared with itself.
    Pair next = cur;
    int s = r + 1;
    for (; s <= opt.max_ring; ++s) {
      next = pair_for(ga, d, k, s);
      if (next.W.size() > cur.W.size() || next.U.size() > cur.U.size()) break;
    }
    const bool saturated = next.W == cur.W && next.U == cur.U;
    BettiVector next_ranks = saturated ? cur_ranks : relative_betti(grid, next.W, next.U, opt.coefficients);
    spdlog::debug("critical groups of M_{}: ring {} |W|={} |U|={}, ring {} |W|={} |U|={}", k, r, cur.W.size(),
                  cur.U.size(), s, next.W.size(), next.U.size());
    if (next_ranks == cur_ranks) {
      res.ring = r;
      res.ranks = cur_ranks;
      res.second = next_ranks;
      res.w_cells = cur.W.size();
      res.u_cells = cur.U.size();
      res.w2_cells = next.W.size();
      res.u2_cells = next.U.size();
      return res;
    }
    cur = std::move(next);
    cur_ranks = std::move(next_ranks);
    r = s;
  }
  fail(ErrorCode::neighborhood_unstable, "critical groups of Morse set " + std::to_string(k) +
                                             " did not stabilize up to ring " + std::to_string(opt.max_ring));
}

BettiVector critical_groups_levelset(const LyapunovField& f, double a, double b, const CubicalGrid& grid,
                                     Coefficients coeff) {
  if (!(a < b)) fail(ErrorCode::invalid_argument, "level interval must satisfy a < b");
  int inside = 0;
  for (double c : f.levels)
    if (c > a && c < b) ++inside;
  if (inside != 1)
    fail(ErrorCode::precondition, "level interval must contain exactly one Morse level, found " + std::to_string(inside));
  return relative_betti(grid, sublevel(f, b), sublevel(f, a), coeff);
}

}  // namespace dimorse
