#include "dimorse/robustness.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dimorse {

namespace {

double box_distance(const Vec& x, const Vec& lo, const Vec& hi) {
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double d = std::max({lo[i] - x[i], x[i] - hi[i], 0.0});
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<Vec> probe_points(const CubicalGrid& grid, const CellSet& cells) {
  const int m = grid.dim();
  std::vector<Vec> out;
  out.reserve(cells.size() * ((1u << m) + 1));
  for (auto c : cells) {
    const std::int64_t g = grid.global_of(c);
    const Vec lo = grid.cell_lo(g), hi = grid.cell_hi(g);
    for (int mask = 0; mask < (1 << m); ++mask) {
      Vec p(m);
      for (int i = 0; i < m; ++i) p[i] = (mask >> i) & 1 ? hi[i] : lo[i];
      out.push_back(p);
    }
    out.push_back(grid.center(g));
  }
  return out;
}

double directed(const CubicalGrid& grid, const CellSet& a, const CellSet& b) {
  const std::vector<Vec> pts = probe_points(grid, a);
  std::vector<Vec> lo, hi;
  for (auto c : b) {
    lo.push_back(grid.cell_lo(grid.global_of(c)));
    hi.push_back(grid.cell_hi(grid.global_of(c)));
  }
  std::vector<double> best(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lo.size() && d > 0; ++k) d = std::min(d, box_distance(pts[i], lo[k], hi[k]));
    best[i] = d;
  });
  return best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

}  // namespace

double hausdorff_distance(const CubicalGrid& grid, const CellSet& a, const CellSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(directed(grid, a, b), directed(grid, b, a));
}

std::vector<RobustnessEntry> inflated_robustness(const SetValuedMapSpec& spec, const CubicalGrid& grid,
                                                 const GraphParams& params, const std::vector<double>& deltas,
                                                 double slack) {
  if (deltas.empty() || deltas.front() != 0.0) fail(ErrorCode::invalid_argument, "δ list must start at 0");
  if (!std::is_sorted(deltas.begin(), deltas.end())) fail(ErrorCode::invalid_argument, "δ list must be ascending");
  std::vector<RobustnessEntry> out;
  CellSet base;
  for (double delta : deltas) {
    RobustnessEntry e;
    e.delta = delta;
    auto rhs = std::make_shared<InflatedRhs>(spec, InflationParams{delta, slack});
    const TransitionGraph g = build_graph(rhs, grid, params, delta);
    GraphAnalysis ga(g);
    const CellSet A = global_attractor(ga);
    e.attractor_cells = A.size();
    if (A.empty()) {
      e.absorbing = false;
      e.hausdorff = std::numeric_limits<double>::quiet_NaN();
      e.message = "every cell reaches the exit; the inflated system has no attractor in the box";
    } else if (delta == 0.0) {
      base = A;
      e.hausdorff = 0.0;
    } else if (base.empty()) {
      e.absorbing = false;
      e.hausdorff = std::numeric_limits<double>::quiet_NaN();
      e.message = "no unperturbed attractor to compare with";
    } else {
      e.hausdorff = hausdorff_distance(grid, A, base);
    }
    spdlog::info("robustness δ={} attractor cells={} distance={}", delta, e.attractor_cells, e.hausdorff);
    out.push_back(e);
  }
  return out;
}

bool distances_monotone(const std::vector<RobustnessEntry>& entries, double slack) {
  double prev = 0.0;
  for (const auto& e : entries) {
    if (!e.absorbing) return false;
    if (e.hausdorff < prev - slack) return false;
    prev = std::max(prev, e.hausdorff);
  }
  return true;
}

std::string robustness_json(const std::vector<RobustnessEntry>& entries, double cell_width) {
  nlohmann::ordered_json j;
  j["cell_width"] = std::stod(format_double(cell_width));
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json r;
    r["delta"] = std::stod(format_double(e.delta));
    r["attractor_cells"] = e.attractor_cells;
    r["absorbing"] = e.absorbing;
    if (e.absorbing)
      r["hausdorff"] = std::stod(format_double(e.hausdorff));
    else
      r["hausdorff"] = nullptr;
    if (!e.message.empty()) r["message"] = e.message;
    arr.push_back(r);
  }
  j["entries"] = arr;
  j["monotone"] = distances_monotone(entries, cell_width);
  return j.dump(1);
}

}  // namespace dimorse
