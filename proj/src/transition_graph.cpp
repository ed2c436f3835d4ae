#include "dimorse/transition_graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

namespace dimorse {

using nlohmann::json;

std::vector<Selection> default_selections(std::uint64_t seed) {
  std::vector<Selection> out(3);
  out[0].strategy = Strategy::closest_to_target;
  for (int j = 1; j < 3; ++j) {
    out[j].strategy = Strategy::random_convex;
    out[j].seed = hash_combine(seed, static_cast<std::uint64_t>(j));
  }
  return out;
}

TransitionGraph::TransitionGraph(CubicalGrid grid, GraphMeta meta, std::vector<std::int64_t> offsets,
                                 std::vector<std::int32_t> targets, std::vector<std::uint8_t> exits)
    : grid_(std::move(grid)), meta_(std::move(meta)), offsets_(std::move(offsets)),
      targets_(std::move(targets)), exits_(std::move(exits)) {
  if (static_cast<std::int64_t>(exits_.size()) != grid_.size() || offsets_.size() != exits_.size() + 1 ||
      offsets_.back() != static_cast<std::int64_t>(targets_.size()))
    fail(ErrorCode::invalid_argument, "inconsistent transition graph layout");
}

TransitionGraph TransitionGraph::from_lists(CubicalGrid grid, GraphMeta meta,
                                            std::vector<std::vector<std::int32_t>> adj,
                                            std::vector<std::uint8_t> exits) {
  std::vector<std::int64_t> off{0};
  std::vector<std::int32_t> tg;
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (auto t : list) {
      if (t < 0 || t >= static_cast<std::int32_t>(adj.size()))
        fail(ErrorCode::invalid_argument, "edge target outside the graph");
      tg.push_back(t);
    }
    off.push_back(static_cast<std::int64_t>(tg.size()));
  }
  return TransitionGraph(std::move(grid), std::move(meta), std::move(off), std::move(tg), std::move(exits));
}

bool TransitionGraph::has_edge(std::int32_t a, std::int32_t b) const {
  auto s = successors(a);
  return std::binary_search(s.begin(), s.end(), b);
}

TransitionGraph TransitionGraph::reversed() const {
  const std::int32_t n = size();
  std::vector<std::int64_t> off(n + 1, 0);
  for (auto t : targets_) ++off[t + 1];
  for (std::int32_t i = 0; i < n; ++i) off[i + 1] += off[i];
  std::vector<std::int32_t> tg(targets_.size());
  std::vector<std::int64_t> pos(off.begin(), off.end() - 1);
  for (std::int32_t a = 0; a < n; ++a)
    for (auto b : successors(a)) tg[pos[b]++] = a;
  return TransitionGraph(grid_, meta_, std::move(off), std::move(tg), exits_);
}

namespace {

struct SamplePlan {
  std::vector<Vec> points;
  std::vector<std::int64_t> cell_offsets;  // CSR over active cells
  std::vector<std::int32_t> cell_points;
};

SamplePlan plan_samples(const CubicalGrid& grid, const SamplingOptions& s) {
  const int m = grid.dim();
  const int base = (1 << m) + 1;
  const int extra = std::max(0, s.points_per_cell - base);
  SamplePlan plan;
  std::unordered_map<std::int64_t, std::int32_t> vertex_slot;
  const std::int64_t nv = grid.per_axis() + 1;
  plan.cell_offsets.push_back(0);
  for (std::int64_t l = 0; l < grid.size(); ++l) {
    const std::int64_t g = grid.global_of(l);
    const Coord c = grid.coords(g);
    const Vec lo = grid.cell_lo(g), hi = grid.cell_hi(g);
    for (int mask = 0; mask < (1 << m); ++mask) {
      std::int64_t vid = 0;
      for (int i = m - 1; i >= 0; --i) vid = vid * nv + c[i] + ((mask >> i) & 1);
      auto [it, fresh] = vertex_slot.try_emplace(vid, static_cast<std::int32_t>(plan.points.size()));
      if (fresh) {
        Vec p(m);
        for (int i = 0; i < m; ++i) p[i] = (mask >> i) & 1 ? hi[i] : lo[i];
        plan.points.push_back(std::move(p));
      }
      plan.cell_points.push_back(it->second);
    }
    plan.cell_points.push_back(static_cast<std::int32_t>(plan.points.size()));
    plan.points.push_back(0.5 * (lo + hi));
    if (extra > 0) {
      CounterRng rng(s.seed, mix64(static_cast<std::uint64_t>(g)));
      for (int e = 0; e < extra; ++e) {
        Vec p(m);
        for (int i = 0; i < m; ++i) p[i] = rng.uniform(lo[i], hi[i]);
        plan.cell_points.push_back(static_cast<std::int32_t>(plan.points.size()));
        plan.points.push_back(std::move(p));
      }
    }
    plan.cell_offsets.push_back(static_cast<std::int64_t>(plan.cell_points.size()));
  }
  return plan;
}

std::vector<Endpoint> endpoints_parallel(const SelectionField& g, const std::vector<Vec>& pts,
                                         double T, double h, const IntegratorOptions& opt) {
  constexpr std::size_t chunk = 256;
  const std::size_t blocks = (pts.size() + chunk - 1) / chunk;
  std::vector<Endpoint> out(pts.size());
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t first = b * chunk, last = std::min(pts.size(), first + chunk);
    std::vector<Vec> part(pts.begin() + first, pts.begin() + last);
    auto e = integrate_endpoints(g, part, T, h, opt);
    std::move(e.begin(), e.end(), out.begin() + first);
  }, 1);
  return out;
}

// Appends the active cells meeting the interior of [y-ρ, y+ρ] (clipped to the
// box) and reports whether the bloated image leaves the analysis region.
bool cover(const CubicalGrid& grid, const Vec& y, double rho, std::vector<std::int32_t>& out) {
  const int m = grid.dim();
  bool exit = false;
  std::int64_t lo[kMaxGridDim], hi[kMaxGridDim];
  for (int i = 0; i < m; ++i) {
    double a = y[i] - rho, b = y[i] + rho;
    if (a < grid.lo()[i] || b > grid.hi()[i]) exit = true;
    a = std::max(a, grid.lo()[i]);
    b = std::min(b, grid.hi()[i]);
    if (a > b) return true;
    const double ua = (a - grid.lo()[i]) / grid.width()[i];
    const double ub = (b - grid.lo()[i]) / grid.width()[i];
    const std::int64_t n = grid.per_axis();
    lo[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(ua)), 0, n - 1);
    hi[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(ub)) - 1, 0, n - 1);
    if (hi[i] < lo[i]) hi[i] = lo[i];
  }
  Coord c{};
  for (int i = 0; i < m; ++i) c[i] = lo[i];
  for (;;) {
    std::int64_t l = grid.local_of(grid.index(c));
    if (l < 0)
      exit = true;
    else
      out.push_back(static_cast<std::int32_t>(l));
    int i = 0;
    for (; i < m; ++i) {
      if (c[i] < hi[i]) { ++c[i]; break; }
      c[i] = lo[i];
    }
    if (i == m) break;
  }
  return exit;
}

}  // namespace

TransitionGraph build_graph(std::shared_ptr<const RightHandSide> rhs, const CubicalGrid& grid,
                            const GraphParams& params, double delta) {
  if (!rhs) fail(ErrorCode::invalid_argument, "missing right-hand side");
  if (rhs->dim() != grid.dim()) fail(ErrorCode::dimension_mismatch, "grid and system dimensions differ");
  if (!(params.tau > 0)) fail(ErrorCode::invalid_argument, "tau must be positive");
  const double h = params.h > 0 ? params.h : params.tau / 10.0;
  if (h > params.tau) fail(ErrorCode::invalid_argument, "integrator step exceeds tau");
  const double rho = params.rho < 0 ? grid.max_width() : params.rho;
  if (grid.size() > std::int64_t{1} << 31) fail(ErrorCode::config, "too many active cells");
  if (params.sampling.points_per_cell < 0) fail(ErrorCode::invalid_argument, "negative sample count");

  std::vector<Selection> sels = params.sampling.selections.empty()
                                    ? default_selections(params.sampling.seed)
                                    : params.sampling.selections;
  GraphMeta meta;
  meta.tau = params.tau;
  meta.h = h;
  meta.rho = rho;
  meta.delta = delta;
  meta.points_per_cell = std::max(params.sampling.points_per_cell, (1 << grid.dim()) + 1);
  meta.seed = params.sampling.seed;
  for (const auto& s : sels) meta.selections.push_back(strategy_name(s.strategy));

  SamplePlan plan = plan_samples(grid, params.sampling);
  const std::size_t np = plan.points.size();

  // Trajectories that never meet a set-valued point are shared by every
  // selection, so later selections only integrate the dependent starts.
  std::vector<std::vector<Endpoint>> ends(sels.size());
  ends[0] = endpoints_parallel(SelectionField(rhs, sels[0]), plan.points, params.tau, h, params.integrator);
  std::vector<std::int32_t> dependent;
  for (std::size_t p = 0; p < np; ++p)
    if (ends[0][p].selection_dependent) dependent.push_back(static_cast<std::int32_t>(p));
  std::vector<std::vector<std::int32_t>> slot(sels.size());
  for (std::size_t s = 1; s < sels.size(); ++s) {
    std::vector<Vec> pts;
    pts.reserve(dependent.size());
    for (auto p : dependent) pts.push_back(plan.points[p]);
    ends[s] = endpoints_parallel(SelectionField(rhs, sels[s]), pts, params.tau, h, params.integrator);
  }
  std::vector<std::int32_t> dep_index(np, -1);
  for (std::size_t k = 0; k < dependent.size(); ++k) dep_index[dependent[k]] = static_cast<std::int32_t>(k);

  const std::int64_t n = grid.size();
  std::vector<std::vector<std::int32_t>> adj(n);
  std::vector<std::uint8_t> exits(n, 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t c) {
    std::vector<std::int32_t> out;
    bool exit = false;
    for (std::int64_t k = plan.cell_offsets[c]; k < plan.cell_offsets[c + 1]; ++k) {
      const std::int32_t p = plan.cell_points[k];
      for (std::size_t s = 0; s < sels.size(); ++s) {
        const Endpoint* e;
        if (s == 0) {
          e = &ends[0][p];
        } else {
          if (dep_index[p] < 0) break;
          e = &ends[s][dep_index[p]];
        }
        if (e->diverged)
          exit = true;
        else if (cover(grid, e->x, rho, out))
          exit = true;
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    adj[c] = std::move(out);
    exits[c] = exit ? 1 : 0;
  });
  return TransitionGraph::from_lists(grid, std::move(meta), std::move(adj), std::move(exits));
}

TransitionGraph build_graph(const SetValuedMapSpec& spec, const CubicalGrid& grid, const GraphParams& params) {
  return build_graph(std::make_shared<SpecRhs>(spec), grid, params, 0.0);
}

CubicalGrid subdivide(const TransitionGraph& graph, const std::vector<std::int32_t>& cells) {
  std::vector<std::int64_t> locals(cells.begin(), cells.end());
  return graph.grid().subdivide(locals);
}

namespace {

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec json_vec(const json& a) {
  Vec v(static_cast<int>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

template <class T>
void write_block(std::ofstream& f, const std::vector<T>& v) {
  f.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
void read_block(std::ifstream& f, std::vector<T>& v, std::size_t n) {
  v.resize(n);
  f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!f) fail(ErrorCode::io, "truncated graph file");
}

}  // namespace

void write_graph(const TransitionGraph& g, const std::string& path) {
  json h;
  h["format"] = "dimorse-graph-1";
  h["grid"] = {{"lo", vec_json(g.grid().lo())}, {"hi", vec_json(g.grid().hi())},
               {"depth", g.grid().depth()}, {"restricted", g.grid().restricted()},
               {"active", static_cast<std::int64_t>(g.grid().active_cells().size())}};
  const auto& m = g.meta();
  h["meta"] = {{"tau", m.tau}, {"h", m.h}, {"rho", m.rho}, {"delta", m.delta},
               {"points_per_cell", m.points_per_cell}, {"selections", m.selections}, {"seed", m.seed}};
  h["cells"] = g.size();
  h["edges"] = g.edge_count();
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "cannot write " + path);
  f << h.dump() << '\n';
  write_block(f, g.grid().active_cells());
  write_block(f, g.offsets());
  write_block(f, g.targets());
  write_block(f, g.exit_flags());
  if (!f) fail(ErrorCode::io, "failed writing " + path);
}

TransitionGraph read_graph(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "cannot read " + path);
  std::string line;
  std::getline(f, line);
  json h;
  try {
    h = json::parse(line);
  } catch (const json::exception& e) {
    fail(ErrorCode::io, "bad graph header in " + path + ": " + e.what());
  }
  if (h.value("format", "") != "dimorse-graph-1") fail(ErrorCode::io, "unknown graph format in " + path);
  CubicalGrid grid(json_vec(h["grid"]["lo"]), json_vec(h["grid"]["hi"]), h["grid"]["depth"].get<int>());
  std::vector<std::int64_t> active;
  read_block(f, active, h["grid"]["active"].get<std::size_t>());
  if (h["grid"]["restricted"].get<bool>()) grid = grid.restricted_to(std::move(active));
  GraphMeta m;
  const json& jm = h["meta"];
  m.tau = jm["tau"];
  m.h = jm["h"];
  m.rho = jm["rho"];
  m.delta = jm["delta"];
  m.points_per_cell = jm["points_per_cell"];
  m.selections = jm["selections"].get<std::vector<std::string>>();
  m.seed = jm["seed"];
  const std::size_t n = h["cells"].get<std::size_t>();
  std::vector<std::int64_t> off;
  std::vector<std::int32_t> tg;
  std::vector<std::uint8_t> ex;
  read_block(f, off, n + 1);
  read_block(f, tg, h["edges"].get<std::size_t>());
  read_block(f, ex, n);
  return TransitionGraph(std::move(grid), std::move(m), std::move(off), std::move(tg), std::move(ex));
}

}  // namespace dimorse
