#include "dimorse/graph_algorithms.hpp"

#include <algorithm>

namespace dimorse {

Mask to_mask(const CellSet& s, std::int32_t n) {
  Mask m(n, 0);
  for (auto c : s) {
    if (c < 0 || c >= n) fail(ErrorCode::invalid_argument, "cell index outside the graph");
    m[c] = 1;
  }
  return m;
}

CellSet from_mask(const Mask& m) {
  CellSet s;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) s.push_back(static_cast<std::int32_t>(i));
  return s;
}

CellSet set_union(const CellSet& a, const CellSet& b) {
  CellSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

CellSet set_intersection(const CellSet& a, const CellSet& b) {
  CellSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

CellSet set_difference(const CellSet& a, const CellSet& b) {
  CellSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const CellSet& a, const CellSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

SccResult strongly_connected(const TransitionGraph& g, const Mask* mask) {
  const std::int32_t n = g.size();
  auto in = [&](std::int32_t v) { return !mask || (*mask)[v]; };
  SccResult r;
  r.component.assign(n, -1);
  std::vector<std::int32_t> index(n, -1), low(n, 0), stack;
  std::vector<std::uint8_t> on_stack(n, 0);
  struct Frame {
    std::int32_t v;
    std::int64_t next;
  };
  std::vector<Frame> call;
  std::int32_t counter = 0;
  for (std::int32_t root = 0; root < n; ++root) {
    if (!in(root) || index[root] >= 0) continue;
    call.push_back({root, g.offsets()[root]});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const std::int32_t v = f.v;
      if (f.next < g.offsets()[v + 1]) {
        const std::int32_t w = g.targets()[f.next++];
        if (!in(w)) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, g.offsets()[w]});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        CellSet comp;
        std::int32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          r.component[w] = r.count;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        const bool rec = comp.size() >= 2 || g.has_edge(v, v);
        r.members.push_back(std::move(comp));
        r.recurrent.push_back(rec ? 1 : 0);
        ++r.count;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::int32_t u = call.back().v;
        low[u] = std::min(low[u], low[v]);
      }
    }
  }
  return r;
}

namespace {

Mask reach(const TransitionGraph& g, const CellSet& seeds, const Mask* mask) {
  const std::int32_t n = g.size();
  Mask seen(n, 0);
  std::vector<std::int32_t> queue;
  for (auto s : seeds) {
    if (s < 0 || s >= n) fail(ErrorCode::invalid_argument, "cell index outside the graph");
    if ((!mask || (*mask)[s]) && !seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    std::int32_t v = queue.back();
    queue.pop_back();
    for (auto w : g.successors(v))
      if (!seen[w] && (!mask || (*mask)[w])) {
        seen[w] = 1;
        queue.push_back(w);
      }
  }
  return seen;
}

}  // namespace

Mask forward_reach(const TransitionGraph& g, const CellSet& seeds, const Mask* mask) {
  return reach(g, seeds, mask);
}

Mask backward_reach(const TransitionGraph& rev, const CellSet& seeds, const Mask* mask) {
  return reach(rev, seeds, mask);
}

Mask reaches_exit(const TransitionGraph& g, const TransitionGraph& rev) {
  CellSet ex;
  for (std::int32_t c = 0; c < g.size(); ++c)
    if (g.exits(c)) ex.push_back(c);
  return backward_reach(rev, ex);
}

CellSet image(const TransitionGraph& g, const CellSet& s, bool* exits) {
  CellSet out;
  bool ex = false;
  for (auto c : s) {
    auto succ = g.successors(c);
    out.insert(out.end(), succ.begin(), succ.end());
    ex = ex || g.exits(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (exits) *exits = ex;
  return out;
}

}  // namespace dimorse
