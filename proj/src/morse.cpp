#include "dimorse/morse.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace dimorse {

using nlohmann::json;

GraphAnalysis::GraphAnalysis(const TransitionGraph& g)
    : g_(&g), rev_(g.reversed()), scc_(strongly_connected(g)), exit_reach_(dimorse::reaches_exit(g, rev_)) {}

CellSet GraphAnalysis::bounded() const {
  CellSet out;
  for (std::int32_t c = 0; c < g_->size(); ++c)
    if (!exit_reach_[c]) out.push_back(c);
  return out;
}

CellSet GraphAnalysis::basin(const CellSet& A) const {
  const Mask in_a = to_mask(A, g_->size());
  CellSet bad;
  for (std::int32_t c = 0; c < g_->size(); ++c)
    if (g_->exits(c) || (recurrent(c) && !in_a[c])) bad.push_back(c);
  Mask hit = backward_reach(rev_, bad);
  CellSet out;
  for (std::int32_t c = 0; c < g_->size(); ++c)
    if (!hit[c]) out.push_back(c);
  return out;
}

CellSet GraphAnalysis::trapped_in(const CellSet& U) const {
  const Mask in_u = to_mask(U, g_->size());
  CellSet bad;
  for (std::int32_t c = 0; c < g_->size(); ++c)
    if (!in_u[c] || g_->exits(c)) bad.push_back(c);
  Mask hit = backward_reach(rev_, bad);
  CellSet out;
  for (std::int32_t c = 0; c < g_->size(); ++c)
    if (!hit[c]) out.push_back(c);
  return out;
}

namespace {

CellSet recurrent_within(const GraphAnalysis& ga, const Mask& m) {
  CellSet out;
  for (std::int32_t c = 0; c < ga.graph().size(); ++c)
    if (m[c] && ga.recurrent(c)) out.push_back(c);
  return out;
}

}  // namespace

CellSet omega_limit(const GraphAnalysis& ga, const CellSet& S) {
  if (S.empty()) fail(ErrorCode::invalid_argument, "omega limit of an empty set");
  for (auto c : S)
    if (ga.reaches_exit(c)) fail(ErrorCode::not_attracted, "set reaches the exit sink");
  const Mask R = forward_reach(ga.graph(), S);
  const CellSet rec = recurrent_within(ga, R);
  const Mask F = forward_reach(ga.graph(), rec);
  const Mask B = backward_reach(ga.reversed(), rec, &R);
  CellSet out;
  for (std::int32_t c = 0; c < ga.graph().size(); ++c)
    if (F[c] && B[c]) out.push_back(c);
  return out;
}

CellSet omega_limit(const TransitionGraph& g, const CellSet& S) { return omega_limit(GraphAnalysis(g), S); }

CellSet global_attractor(const GraphAnalysis& ga) {
  CellSet b = ga.bounded();
  if (b.empty()) fail(ErrorCode::no_attractor_certificate, "every cell reaches the exit sink");
  return omega_limit(ga, b);
}

AttractorReport find_attractor(const GraphAnalysis& ga, const CellSet& U) {
  if (U.empty()) fail(ErrorCode::invalid_argument, "attractor search needs a nonempty set");
  for (auto c : U)
    if (ga.reaches_exit(c))
      fail(ErrorCode::no_attractor_certificate, "the candidate set is not absorbed: it reaches the exit sink");
  const Mask R = forward_reach(ga.graph(), U);
  const Mask F = forward_reach(ga.graph(), recurrent_within(ga, R));
  const Mask in_u = to_mask(U, ga.graph().size());
  for (std::int32_t c = 0; c < ga.graph().size(); ++c)
    if (F[c] && !in_u[c])
      fail(ErrorCode::no_attractor_certificate, "the candidate set is not eventually absorbed into itself");
  AttractorReport r;
  r.attractor = omega_limit(ga, U);
  r.basin = ga.basin(r.attractor);
  r.relative_basin = set_intersection(r.basin, ga.trapped_in(U));
  r.dual_repeller = dual_repeller(ga, r.attractor, global_attractor(ga));
  return r;
}

AttractorReport find_attractor(const TransitionGraph& g, const CellSet& U) { return find_attractor(GraphAnalysis(g), U); }

CellSet dual_repeller(const GraphAnalysis& ga, const CellSet& A, const CellSet& global) {
  if (!is_subset(A, global)) fail(ErrorCode::invalid_argument, "attractor is not inside the global attractor");
  return set_difference(global, ga.basin(A));
}

CellSet dual_repeller(const TransitionGraph& g, const CellSet& A, const CellSet& global) {
  return dual_repeller(GraphAnalysis(g), A, global);
}

void cell_hull(const CubicalGrid& grid, const CellSet& cells, Vec& lo, Vec& hi) {
  const int m = grid.dim();
  lo = Vec::Constant(m, std::numeric_limits<double>::infinity());
  hi = Vec::Constant(m, -std::numeric_limits<double>::infinity());
  for (auto c : cells) {
    const std::int64_t g = grid.global_of(c);
    lo = lo.cwiseMin(grid.cell_lo(g));
    hi = hi.cwiseMax(grid.cell_hi(g));
  }
}

bool hull_contains(const CubicalGrid& grid, const CellSet& cells, const Vec& x) {
  if (cells.empty()) return false;
  Vec lo, hi;
  cell_hull(grid, cells, lo, hi);
  for (int i = 0; i < grid.dim(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

double hull_diameter(const CubicalGrid& grid, const CellSet& cells) {
  if (cells.empty()) return 0.0;
  Vec lo, hi;
  cell_hull(grid, cells, lo, hi);
  return (hi - lo).maxCoeff();
}

namespace {

struct Bits {
  std::vector<std::uint64_t> w;
  explicit Bits(std::size_t n = 0) : w((n + 63) / 64, 0) {}
  void set(std::size_t i) { w[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  void reset(std::size_t i) { w[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void merge(const Bits& o) {
    for (std::size_t k = 0; k < w.size(); ++k) w[k] |= o.w[k];
  }
};

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

// Cells reachable from and reaching `cells` inside the region mask.
CellSet order_convex_closure(const GraphAnalysis& ga, const CellSet& cells, const Mask& region) {
  const Mask F = forward_reach(ga.graph(), cells, &region);
  const Mask B = backward_reach(ga.reversed(), cells, &region);
  CellSet out;
  for (std::int32_t c = 0; c < ga.graph().size(); ++c)
    if (F[c] && B[c]) out.push_back(c);
  return out;
}

// Groups of recurrent components (indices into `comps`) that the refinement
// test merges.
void prune_merges(const GraphAnalysis& ga, const std::vector<std::int32_t>& comps, const PruneOptions& opt,
                  UnionFind& uf, int& merges);

}  // namespace

namespace {

// Basin index: the largest Morse index reachable, unless an exit or a
// recurrent cell outside every Morse set is reachable.
void assign_basin_index(const GraphAnalysis& ga, MorseDecomposition& d) {
  const TransitionGraph& g = ga.graph();
  const SccResult& scc = ga.scc();
  const std::int32_t n = g.size();
  std::vector<int> val(scc.count, 0);
  std::vector<char> bad(scc.count, 0);
  for (std::int32_t k = 0; k < scc.count; ++k) {
    int v = d.morse_index[scc.members[k][0]];
    bool b = scc.recurrent[k] && v == 0;
    for (auto c : scc.members[k]) {
      b = b || g.exits(c);
      for (auto w : g.successors(c)) {
        std::int32_t kw = scc.component[w];
        if (kw == k) continue;
        v = std::max(v, val[kw]);
        b = b || bad[kw];
      }
    }
    val[k] = v;
    bad[k] = b;
  }
  d.basin_index.assign(n, -1);
  for (std::int32_t c = 0; c < n; ++c) {
    std::int32_t k = scc.component[c];
    if (!bad[k] && val[k] > 0) d.basin_index[c] = val[k];
  }

}

}  // namespace

MorseDecomposition morse_decomposition(const GraphAnalysis& ga, const CellSet& global, const MorseOptions& opt) {
  const TransitionGraph& g = ga.graph();
  const CubicalGrid& grid = g.grid();
  const std::int32_t n = g.size();
  const Mask region = to_mask(global, n);
  const SccResult& scc = ga.scc();

  // Recurrent components inside the region, in Tarjan order.
  std::vector<std::int32_t> comps;
  std::vector<char> comp_in(scc.count, 0);
  for (std::int32_t k = 0; k < scc.count; ++k) {
    bool inside = !scc.members[k].empty() && region[scc.members[k][0]];
    comp_in[k] = inside;
    if (inside && scc.recurrent[k]) comps.push_back(k);
  }

  MorseDecomposition d;
  d.region = global;
  UnionFind uf(static_cast<int>(comps.size()));
  if (opt.prune && comps.size() > 1) prune_merges(ga, comps, *opt.prune, uf, d.pruned_merges);

  // Merged groups are closed under the order so the quotient stays acyclic;
  // closing may swallow further components.
  std::vector<std::int32_t> comp_slot(scc.count, -1);
  for (std::size_t i = 0; i < comps.size(); ++i) comp_slot[comps[i]] = static_cast<std::int32_t>(i);
  std::vector<CellSet> group_cells;
  for (bool changed = true; changed;) {
    changed = false;
    std::map<int, CellSet> raw;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      CellSet& s = raw[uf.find(static_cast<int>(i))];
      s = set_union(s, scc.members[comps[i]]);
    }
    group_cells.clear();
    for (auto& [root, cells] : raw) {
      bool multi = false;
      for (std::size_t i = 0; i < comps.size(); ++i)
        if (uf.find(static_cast<int>(i)) == root && static_cast<int>(i) != root) multi = true;
      CellSet closed = multi ? order_convex_closure(ga, cells, region) : cells;
      for (auto c : closed) {
        std::int32_t slot = comp_slot[scc.component[c]];
        if (slot >= 0 && uf.unite(slot, root)) changed = true;
      }
      group_cells.push_back(std::move(closed));
    }
  }

  // Map every component of the region to its group (or -1).
  std::map<int, int> root_to_group;
  {
    int gi = 0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      int r = uf.find(static_cast<int>(i));
      if (!root_to_group.count(r)) root_to_group[r] = gi++;
    }
  }
  const int G = static_cast<int>(group_cells.size());
  std::vector<int> cell_group(n, -1);
  for (int gi = 0; gi < G; ++gi)
    for (auto c : group_cells[gi]) cell_group[c] = gi;
  std::vector<int> comp_group(scc.count, -1);
  for (std::int32_t k = 0; k < scc.count; ++k)
    if (comp_in[k]) comp_group[k] = cell_group[scc.members[k][0]];

  // Groups strictly below each component, by a sinks-first sweep.
  std::vector<Bits> below(scc.count);
  for (std::int32_t k = 0; k < scc.count; ++k) {
    if (!comp_in[k]) continue;
    below[k] = Bits(G);
    for (auto c : scc.members[k])
      for (auto w : g.successors(c)) {
        std::int32_t kw = scc.component[w];
        if (kw == k || !comp_in[kw]) continue;
        below[k].merge(below[kw]);
        if (comp_group[kw] >= 0) below[k].set(comp_group[kw]);
      }
  }
  std::vector<Bits> gbelow(G, Bits(G));
  for (std::int32_t k = 0; k < scc.count; ++k)
    if (comp_in[k] && comp_group[k] >= 0) gbelow[comp_group[k]].merge(below[k]);
  for (int gi = 0; gi < G; ++gi) gbelow[gi].reset(gi);

  std::vector<Vec> glo(G), ghi(G);
  for (int gi = 0; gi < G; ++gi) cell_hull(grid, group_cells[gi], glo[gi], ghi[gi]);
  auto centroid_less = [&](int a, int b) {
    Vec ca = 0.5 * (glo[a] + ghi[a]), cb = 0.5 * (glo[b] + ghi[b]);
    for (int i = 0; i < ca.size(); ++i)
      if (ca[i] != cb[i]) return ca[i] < cb[i];
    return group_cells[a].front() < group_cells[b].front();
  };

  std::vector<int> order;
  std::vector<char> placed(G, 0);
  while (static_cast<int>(order.size()) < G) {
    int best = -1;
    for (int gi = 0; gi < G; ++gi) {
      if (placed[gi]) continue;
      bool ready = true;
      for (int gj = 0; gj < G && ready; ++gj)
        if (gbelow[gi].test(gj) && !placed[gj]) ready = false;
      if (ready && (best < 0 || centroid_less(gi, best))) best = gi;
    }
    if (best < 0) fail(ErrorCode::invariant_violation, "cyclic order between Morse sets");
    placed[best] = 1;
    order.push_back(best);
  }
  std::vector<int> rank(G);
  for (int k = 0; k < G; ++k) rank[order[k]] = k + 1;

  d.morse_index.assign(n, 0);
  for (int k = 0; k < G; ++k) {
    d.sets.push_back(group_cells[order[k]]);
    d.hull_lo.push_back(glo[order[k]]);
    d.hull_hi.push_back(ghi[order[k]]);
    for (auto c : d.sets.back()) d.morse_index[c] = k + 1;
  }
  for (int gi = 0; gi < G; ++gi)
    for (int gj = 0; gj < G; ++gj)
      if (gbelow[gi].test(gj)) d.order.emplace_back(rank[gi], rank[gj]);
  std::sort(d.order.begin(), d.order.end());

  d.attractors.push_back({});
  CellSet seeds;
  for (int k = 0; k < G; ++k) {
    seeds = set_union(seeds, d.sets[k]);
    d.attractors.push_back(from_mask(forward_reach(g, seeds, &region)));
  }

  assign_basin_index(ga, d);
  verify_decomposition(ga, d);
  return d;
}

MorseDecomposition morse_decomposition(const TransitionGraph& g, const CellSet& global, const MorseOptions& opt) {
  return morse_decomposition(GraphAnalysis(g), global, opt);
}

void verify_decomposition(const GraphAnalysis& ga, const MorseDecomposition& d) {
  const TransitionGraph& g = ga.graph();
  const std::int32_t n = g.size();
  const Mask region = to_mask(d.region, n);
  auto violated = [](const std::string& what) { fail(ErrorCode::invariant_violation, what); };
  std::vector<int> owner(n, 0);
  for (int k = 0; k < d.size(); ++k)
    for (auto c : d.sets[k]) {
      if (owner[c]) violated("Morse sets are not disjoint");
      if (!region[c]) violated("Morse set leaves the global attractor");
      owner[c] = k + 1;
    }
  if (static_cast<int>(d.attractors.size()) != d.size() + 1 || !d.attractors[0].empty())
    violated("filtration has the wrong length");
  CellSet acc;
  for (int k = 1; k <= d.size(); ++k) {
    const CellSet& A = d.attractors[k];
    acc = set_union(acc, from_mask(forward_reach(g, d.sets[k - 1], &region)));
    if (acc != A) violated("A_k differs from the union of unstable sets of M_1..M_k");
    if (!is_subset(d.attractors[k - 1], A)) violated("filtration is not increasing");
    bool ex = false;
    if (!is_subset(image(g, A, &ex), A) || ex) violated("filtration member is not forward invariant");
    CellSet dual = set_difference(d.region, ga.basin(d.attractors[k - 1]));
    if (set_intersection(A, dual) != d.sets[k - 1]) violated("M_k differs from A_k ∩ A*_{k-1}");
  }
  for (std::int32_t c = 0; c < n; ++c) {
    if (!owner[c]) continue;
    for (auto w : g.successors(c))
      if (owner[w] && owner[w] != owner[c] && owner[w] > owner[c]) violated("edge increases the Morse index");
  }
  if (!d.attractors.empty() && d.attractors.back() != d.region) violated("A_l differs from the global attractor");
}

namespace {

void prune_merges(const GraphAnalysis& ga, const std::vector<std::int32_t>& comps, const PruneOptions& opt,
                  UnionFind& uf, int& merges) {
  const TransitionGraph& g = ga.graph();
  const CubicalGrid& grid = g.grid();
  const SccResult& scc = ga.scc();
  const double limit = opt.max_diameter_cells * grid.max_width() * (1.0 + 1e-9);
  const int K = static_cast<int>(comps.size());
  std::vector<std::int32_t> slot_of(scc.count, -1);
  for (int i = 0; i < K; ++i) slot_of[comps[i]] = i;

  for (int i = 0; i < K; ++i) {
    const CellSet& small = scc.members[comps[i]];
    if (hull_diameter(grid, small) > limit) continue;
    // Neighbors: recurrent components joined to this one by a direct edge in
    // either direction, or sharing a face with it.
    std::vector<int> nbrs;
    for (auto c : small) {
      auto consider = [&](std::int32_t w) {
        int s = slot_of[scc.component[w]];
        if (s >= 0 && s != i) nbrs.push_back(s);
      };
      for (auto w : g.successors(c)) consider(w);
      for (auto w : ga.reversed().successors(c)) consider(w);
      const Coord cc = grid.coords(grid.global_of(c));
      for (int ax = 0; ax < grid.dim(); ++ax)
        for (int s = -1; s <= 1; s += 2) {
          Coord nc = cc;
          nc[ax] += s;
          if (!grid.in_range(nc)) continue;
          std::int64_t l = grid.local_of(grid.index(nc));
          if (l >= 0) consider(static_cast<std::int32_t>(l));
        }
    }
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    for (int j : nbrs) {
      if (uf.find(i) == uf.find(j)) continue;
      // Refine the two components and the cells between them, rebuild the
      // local graph, and merge when the refined pieces are mutually reachable.
      CellSet both = set_union(small, scc.members[comps[j]]);
      Mask all(g.size(), 1);
      CellSet local = order_convex_closure(ga, both, all);
      local = set_union(local, both);
      std::vector<std::int32_t> cells(local.begin(), local.end());
      CubicalGrid fine = subdivide(g, cells);
      TransitionGraph fg = build_graph(opt.rhs, fine, opt.params, g.meta().delta);
      SccResult fs = strongly_connected(fg);
      auto child_comps = [&](const CellSet& coarse) {
        std::vector<std::int32_t> out;
        for (auto c : coarse) {
          const Coord cc = grid.coords(grid.global_of(c));
          for (int mask = 0; mask < (1 << grid.dim()); ++mask) {
            Coord k{};
            for (int ax = 0; ax < grid.dim(); ++ax) k[ax] = 2 * cc[ax] + ((mask >> ax) & 1);
            std::int64_t l = fine.local_of(fine.index(k));
            if (l >= 0 && fs.recurrent[fs.component[l]]) out.push_back(fs.component[l]);
          }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
      };
      // Merge when every refined recurrent piece under the small component
      // also meets the neighbor; that includes the case where refinement
      // leaves no recurrence under the small component at all.
      auto a = child_comps(small), b = child_comps(scc.members[comps[j]]);
      if (std::includes(b.begin(), b.end(), a.begin(), a.end()) && uf.unite(i, j)) ++merges;
    }
  }
}

}  // namespace

std::string decomposition_json(const TransitionGraph& g, const MorseDecomposition& d) {
  const CubicalGrid& grid = g.grid();
  auto globals = [&](const CellSet& s) {
    std::vector<std::int64_t> out;
    out.reserve(s.size());
    for (auto c : s) out.push_back(grid.global_of(c));
    return out;
  };
  auto vec = [](const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(std::stod(format_double(v[i])));
    return a;
  };
  json j;
  j["grid"] = {{"lo", vec(grid.lo())}, {"hi", vec(grid.hi())}, {"depth", grid.depth()}};
  j["num_morse_sets"] = d.size();
  j["region"] = globals(d.region);
  json sets = json::array();
  for (int k = 0; k < d.size(); ++k)
    sets.push_back({{"index", k + 1}, {"cells", globals(d.sets[k])}, {"hull_lo", vec(d.hull_lo[k])},
                    {"hull_hi", vec(d.hull_hi[k])}});
  j["morse_sets"] = sets;
  json filt = json::array();
  for (const auto& A : d.attractors) filt.push_back(globals(A));
  j["filtration"] = filt;
  json ord = json::array();
  for (auto [a, b] : d.order) ord.push_back({a, b});
  j["order"] = ord;
  j["pruned_merges"] = d.pruned_merges;
  return j.dump(1);
}

std::string decomposition_dot(const TransitionGraph& g, const MorseDecomposition& d) {
  std::ostringstream os;
  os << "digraph morse {\n  rankdir=TB;\n";
  for (int k = 0; k < d.size(); ++k) {
    Vec c = 0.5 * (d.hull_lo[k] + d.hull_hi[k]);
    os << "  M" << k + 1 << " [label=\"M" << k + 1 << "\\n" << d.sets[k].size() << " cells\\n(";
    for (int i = 0; i < c.size(); ++i) os << (i ? ", " : "") << format_double(c[i], 4);
    os << ")\"];\n";
  }
  // Transitive reduction of the order for readability.
  std::vector<std::vector<char>> rel(d.size() + 1, std::vector<char>(d.size() + 1, 0));
  for (auto [a, b] : d.order) rel[a][b] = 1;
  for (auto [a, b] : d.order) {
    bool implied = false;
    for (int m = 1; m <= d.size() && !implied; ++m)
      if (rel[a][m] && rel[m][b]) implied = true;
    if (!implied) os << "  M" << a << " -> M" << b << ";\n";
  }
  (void)g;
  os << "}\n";
  return os.str();
}

std::string condensation_dot(const GraphAnalysis& ga) {
  const TransitionGraph& g = ga.graph();
  const SccResult& scc = ga.scc();
  std::vector<int> id(scc.count, -1);
  int next = 0;
  for (std::int32_t k = 0; k < scc.count; ++k)
    if (scc.recurrent[k]) id[k] = next++;
  const int exit_id = next;
  // For each SCC: recurrent components reachable through transient cells.
  std::vector<Bits> reach(scc.count, Bits(next + 1));
  std::ostringstream os;
  os << "digraph condensation {\n";
  for (std::int32_t k = 0; k < scc.count; ++k) {
    for (auto c : scc.members[k]) {
      if (g.exits(c)) reach[k].set(exit_id);
      for (auto w : g.successors(c)) {
        std::int32_t kw = scc.component[w];
        if (kw == k) continue;
        if (id[kw] >= 0)
          reach[k].set(id[kw]);
        else
          reach[k].merge(reach[kw]);
      }
    }
    if (id[k] >= 0) {
      os << "  R" << id[k] << " [label=\"R" << id[k] << "\\n" << scc.members[k].size() << " cells\"];\n";
      for (int t = 0; t <= next; ++t)
        if (reach[k].test(t)) {
          if (t == exit_id)
            os << "  R" << id[k] << " -> exit;\n";
          else
            os << "  R" << id[k] << " -> R" << t << ";\n";
        }
    }
  }
  os << "  exit [shape=box,label=\"exit\"];\n}\n";
  return os.str();
}

MorseDecomposition decomposition_from_json(const GraphAnalysis& ga, const std::string& text) {
  const TransitionGraph& g = ga.graph();
  const CubicalGrid& grid = g.grid();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("decomposition file does not parse: ") + e.what());
  }
  auto locals = [&](const json& arr) {
    CellSet out;
    for (const auto& v : arr) {
      const std::int64_t l = grid.local_of(v.get<std::int64_t>());
      if (l < 0) fail(ErrorCode::config, "decomposition refers to a cell outside the graph");
      out.push_back(static_cast<std::int32_t>(l));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  MorseDecomposition d;
  try {
    if (j.at("grid").at("depth").get<int>() != grid.depth())
      fail(ErrorCode::config, "decomposition was computed on a different grid");
    d.region = locals(j.at("region"));
    d.morse_index.assign(g.size(), 0);
    for (const auto& s : j.at("morse_sets")) {
      d.sets.push_back(locals(s.at("cells")));
      Vec lo, hi;
      if (!d.sets.back().empty()) cell_hull(grid, d.sets.back(), lo, hi);
      d.hull_lo.push_back(lo);
      d.hull_hi.push_back(hi);
      for (auto c : d.sets.back()) d.morse_index[c] = d.size();
    }
    for (const auto& a : j.at("filtration")) d.attractors.push_back(locals(a));
    for (const auto& p : j.at("order")) d.order.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    d.pruned_merges = j.value("pruned_merges", 0);
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("malformed decomposition file: ") + e.what());
  }
  assign_basin_index(ga, d);
  verify_decomposition(ga, d);
  return d;
}

}  // namespace dimorse
