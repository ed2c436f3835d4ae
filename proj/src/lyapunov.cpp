#include "dimorse/lyapunov.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dimorse {

using nlohmann::json;

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

BumpAlpha::BumpAlpha(Vec hull_lo, Vec hull_hi, double delta)
    : lo_(std::move(hull_lo)), hi_(std::move(hull_hi)), delta_(delta) {
  if (!(delta > 0)) fail(ErrorCode::invalid_argument, "bump radius must be positive");
  if (lo_.size() != hi_.size()) fail(ErrorCode::dimension_mismatch, "hull bounds differ in dimension");
}

BumpAlpha BumpAlpha::of_cells(const CubicalGrid& grid, const CellSet& cells, double delta) {
  if (cells.empty()) fail(ErrorCode::invalid_argument, "bump around an empty attractor");
  Vec lo, hi;
  cell_hull(grid, cells, lo, hi);
  return BumpAlpha(lo, hi, delta);
}

double BumpAlpha::distance(const Vec& x) const {
  if (x.size() != lo_.size()) fail(ErrorCode::dimension_mismatch, "point has wrong dimension");
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    double d = std::max({lo_[i] - x[i], x[i] - hi_[i], 0.0});
    s += d * d;
  }
  return std::sqrt(s);
}

double BumpAlpha::operator()(const Vec& x) const {
  return smooth_step((distance(x) - 0.5 * delta_) / (0.5 * delta_));
}

double integral_lyapunov(std::shared_ptr<const RightHandSide> rhs, const BumpAlpha& alpha, const Vec& x, double T,
                         int n_selections, std::uint64_t seed, const IntegralOptions& opt) {
  if (n_selections < 1) fail(ErrorCode::invalid_argument, "need at least one selection");
  if (!(T > 0) || !(opt.h > 0) || opt.h > T) fail(ErrorCode::invalid_argument, "bad integration horizon");
  double best = 0.0;
  for (int j = 0; j < n_selections; ++j) {
    Selection sel;
    if (j == 0) {
      sel.strategy = Strategy::closest_to_target;
    } else {
      sel.strategy = Strategy::random_convex;
      sel.seed = hash_combine(seed, static_cast<std::uint64_t>(j));
    }
    Trajectory tr = integrate(SelectionField(rhs, sel), x, T, opt.h, opt.integrator);
    double sum = 0.0, dwell = 0.0;
    bool done = false;
    double prev = std::exp(tr.times[0]) * alpha(tr.states[0]);
    bool prev_zero = alpha.in_zero_zone(tr.states[0]);
    for (std::size_t i = 1; i < tr.states.size(); ++i) {
      const double dt = tr.times[i] - tr.times[i - 1];
      const bool zero = alpha.in_zero_zone(tr.states[i]);
      const double cur = zero ? 0.0 : std::exp(tr.times[i]) * alpha(tr.states[i]);
      sum += 0.5 * dt * (prev + cur);
      dwell = zero && prev_zero ? dwell + dt : 0.0;
      if (zero && !prev_zero) dwell = 0.0;
      prev = cur;
      prev_zero = zero;
      if (dwell >= opt.dwell - 1e-12) {
        done = true;
        break;
      }
    }
    if (!done) {
      // A start inside the zone with a complete dwell from t = 0 is the only
      // case where the loop cannot finish early at T = dwell exactly.
      fail(ErrorCode::truncation_unsound,
           "trajectory did not settle in the zero zone of the weight before the horizon; increase T");
    }
    best = std::max(best, sum);
  }
  return best;
}

double integral_lyapunov(const SetValuedMapSpec& spec, const BumpAlpha& alpha, const Vec& x, double T,
                         int n_selections, std::uint64_t seed, const IntegralOptions& opt) {
  return integral_lyapunov(std::make_shared<SpecRhs>(spec), alpha, x, T, n_selections, seed, opt);
}

LyapunovField graph_ml_function(const MorseDecomposition& d, const TransitionGraph& g) {
  const std::int32_t n = g.size();
  if (static_cast<std::int32_t>(d.basin_index.size()) != n)
    fail(ErrorCode::invalid_argument, "decomposition belongs to a different graph");
  LyapunovField f;
  f.morse_index = d.morse_index;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  f.V.assign(n, nan);
  f.w.assign(n, nan);
  for (std::int32_t c = 0; c < n; ++c)
    if (d.basin_index[c] > 0) f.region.push_back(c);
  for (auto c : f.region)
    for (auto w : g.successors(c)) {
      if (d.basin_index[w] <= 0) fail(ErrorCode::invariant_violation, "edge leaves the basin region");
      if (d.basin_index[w] > d.basin_index[c]) fail(ErrorCode::invariant_violation, "edge increases the Morse index");
    }

  // Longest chain of same-level transient cells, sinks first.
  const SccResult scc = strongly_connected(g);
  std::vector<int> ell(n, 0);
  int L = 0;
  for (std::int32_t k = 0; k < scc.count; ++k) {
    for (auto c : scc.members[k]) {
      if (d.basin_index[c] <= 0 || d.morse_index[c] > 0) continue;
      if (scc.members[k].size() > 1 || scc.recurrent[k])
        fail(ErrorCode::invariant_violation, "recurrent cell outside every Morse set");
      int best = 0;
      for (auto w : g.successors(c))
        if (d.basin_index[w] == d.basin_index[c] && d.morse_index[w] == 0) best = std::max(best, ell[w]);
      ell[c] = best + 1;
      L = std::max(L, ell[c]);
    }
  }
  f.longest_path = L;
  f.step = 1.0 / (L + 1);
  for (auto c : f.region) f.V[c] = (d.basin_index[c] - 1) + static_cast<double>(ell[c]) * f.step;
  for (auto c : f.region) {
    if (d.morse_index[c] > 0) {
      f.w[c] = 0.0;
      continue;
    }
    double m = std::numeric_limits<double>::infinity();
    for (auto w : g.successors(c)) m = std::min(m, f.V[c] - f.V[w]);
    if (!(m > 0)) fail(ErrorCode::invariant_violation, "value does not decrease along an edge");
    f.w[c] = m;
  }
  for (int k = 1; k <= d.size(); ++k) f.levels.push_back(k - 1.0);
  return f;
}

double interpolate(const LyapunovField& f, const CubicalGrid& grid, const Vec& x) {
  const int m = grid.dim();
  std::int64_t base[kMaxGridDim];
  double frac[kMaxGridDim];
  const std::int64_t n = grid.per_axis();
  for (int i = 0; i < m; ++i) {
    double u = (x[i] - grid.lo()[i]) / grid.width()[i] - 0.5;
    u = std::clamp(u, 0.0, static_cast<double>(n - 1));
    std::int64_t b = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(u)), std::max<std::int64_t>(n - 2, 0));
    base[i] = b;
    frac[i] = n > 1 ? u - static_cast<double>(b) : 0.0;
  }
  double v = 0.0;
  for (int mask = 0; mask < (1 << m); ++mask) {
    double wgt = 1.0;
    Coord c{};
    for (int i = 0; i < m; ++i) {
      const int bit = (mask >> i) & 1;
      c[i] = std::min(base[i] + bit, n - 1);
      wgt *= bit ? frac[i] : 1.0 - frac[i];
    }
    if (wgt == 0.0) continue;
    std::int64_t l = grid.local_of(grid.index(c));
    if (l < 0 || !f.defined(static_cast<std::int32_t>(l))) return std::numeric_limits<double>::quiet_NaN();
    v += wgt * f.V[l];
  }
  return v;
}

double slope_unit(const LyapunovField& f, const CubicalGrid& grid) { return f.step / grid.width().minCoeff(); }

CertificateReport decrease_certificate(const LyapunovField& f, const SetValuedMapSpec& spec, const TransitionGraph& g,
                                       std::size_t n_samples, std::uint64_t seed, double tol, bool include_morse) {
  const CubicalGrid& grid = g.grid();
  if (spec.dim() != grid.dim()) fail(ErrorCode::dimension_mismatch, "system and grid dimensions differ");
  CertificateReport rep;
  rep.requested = n_samples;
  rep.tolerance = tol < 0 ? slope_unit(f, grid) : tol;
  CellSet pool;
  for (auto c : f.region)
    if (include_morse || f.morse_index[c] == 0) pool.push_back(c);
  if (pool.empty() || n_samples == 0) return rep;
  const int m = grid.dim();
  std::vector<double> margin(n_samples, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> ok(n_samples, 0);
  parallel_for(n_samples, [&](std::size_t s) {
    CounterRng rng(seed, s);
    const std::int32_t c = pool[rng.below(pool.size())];
    const std::int64_t gidx = grid.global_of(c);
    const Vec lo = grid.cell_lo(gidx), hi = grid.cell_hi(gidx);
    Vec x(m);
    for (int i = 0; i < m; ++i) x[i] = rng.uniform(lo[i], hi[i]);
    Vec grad(m);
    for (int i = 0; i < m; ++i) {
      const double p = 0.5 * grid.width()[i];
      Vec xp = x, xm = x;
      xp[i] = std::min(x[i] + p, grid.hi()[i]);
      xm[i] = std::max(x[i] - p, grid.lo()[i]);
      const double vp = interpolate(f, grid, xp), vm = interpolate(f, grid, xm);
      if (!(vp == vp) || !(vm == vm)) return;
      grad[i] = (vp - vm) / (xp[i] - xm[i]);
    }
    const Polytope P = evaluate(spec, x);
    double best = -std::numeric_limits<double>::infinity(), speed = 0.0;
    for (int k = 0; k < P.size(); ++k) {
      const Vec v = P.vertex(k);
      best = std::max(best, grad.dot(v));
      speed = std::max(speed, v.norm());
    }
    margin[s] = best + f.w[c];
    ok[s] = margin[s] <= rep.tolerance * speed + 1e-12;
  });
  rep.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n_samples; ++s) {
    if (!(margin[s] == margin[s])) continue;
    ++rep.evaluated;
    rep.passed += ok[s] ? 1 : 0;
    rep.worst_margin = std::max(rep.worst_margin, margin[s]);
  }
  if (rep.evaluated == 0) rep.worst_margin = 0.0;
  return rep;
}

CellSet sublevel(const LyapunovField& f, double a) {
  CellSet out;
  for (auto c : f.region)
    if (f.V[c] <= a) out.push_back(c);
  return out;
}

std::string lyapunov_csv(const LyapunovField& f, const TransitionGraph& g) {
  const CubicalGrid& grid = g.grid();
  std::ostringstream os;
  os << "cell";
  for (int i = 0; i < grid.dim(); ++i) os << ",x" << i;
  os << ",V,w\n";
  for (auto c : f.region) {
    const Vec x = grid.center(grid.global_of(c));
    os << grid.global_of(c);
    for (int i = 0; i < grid.dim(); ++i) os << ',' << format_double(x[i]);
    os << ',' << format_double(f.V[c]) << ',' << format_double(f.w[c]) << '\n';
  }
  return os.str();
}

std::string lyapunov_json(const LyapunovField& f, const CertificateReport* cert) {
  json j;
  j["mode"] = f.mode;
  j["levels"] = f.levels;
  j["region_cells"] = f.region.size();
  j["longest_path"] = f.longest_path;
  j["step"] = std::stod(format_double(f.step));
  double vmax = 0.0;
  for (auto c : f.region) vmax = std::max(vmax, f.V[c]);
  j["max_value"] = std::stod(format_double(vmax));
  if (cert) {
    j["certificate"] = {{"requested", cert->requested},
                        {"evaluated", cert->evaluated},
                        {"passed", cert->passed},
                        {"pass_rate", std::stod(format_double(cert->pass_rate()))},
                        {"tolerance", std::stod(format_double(cert->tolerance))},
                        {"worst_margin", std::stod(format_double(cert->worst_margin))}};
  }
  return j.dump(1);
}

}  // namespace dimorse
