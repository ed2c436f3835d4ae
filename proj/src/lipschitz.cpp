#include "dimorse/lipschitz.hpp"

#include <algorithm>
#include <cmath>

namespace dimorse {

std::size_t LipschitzApproximation::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(k.level));
  for (auto v : k.idx) h = hash_combine(h, static_cast<std::uint64_t>(v));
  return static_cast<std::size_t>(h);
}

LipschitzApproximation::LipschitzApproximation(SetValuedMapSpec spec, double delta, double R,
                                               LipschitzOptions opt)
    : spec_(std::move(spec)), delta_(delta), R_(R), opt_(opt) {
  if (!(delta > 0) || !std::isfinite(delta)) fail(ErrorCode::invalid_argument, "delta must be positive");
  if (!(R > 0) || !std::isfinite(R)) fail(ErrorCode::invalid_argument, "radius must be positive");
  pitch_ = delta / 4.0;
  double n = std::ceil(2.0 * R / pitch_);
  if (n > 1e15) fail(ErrorCode::resolution, "root grid too fine; use a larger delta");
  roots_per_axis_ = static_cast<std::int64_t>(n);
}

void LipschitzApproximation::box_of(const Key& key, Vec& lo, Vec& hi) const {
  const double side = std::ldexp(pitch_, -key.level);
  lo.resize(dim());
  hi.resize(dim());
  for (int i = 0; i < dim(); ++i) {
    lo[i] = -R_ + static_cast<double>(key.idx[i]) * side;
    hi[i] = lo[i] + side;
  }
}

LipschitzApproximation::Node LipschitzApproximation::build(const Key& key) const {
  const int m = dim();
  Vec lo, hi;
  box_of(key, lo, hi);
  const double side = hi[0] - lo[0];
  Vec elo = lo.array() - 0.25 * side;
  Vec ehi = hi.array() + 0.25 * side;
  Vec z = 0.5 * (lo + hi);

  std::vector<Vec> candidates{z};
  std::vector<int> straddled;
  for (int i : spec_.switch_coords())
    if (lo[i] <= 0.0 && hi[i] >= 0.0) straddled.push_back(i);
  for (int mask = 1; mask < (1 << straddled.size()); ++mask) {
    Vec c = z;
    for (std::size_t t = 0; t < straddled.size(); ++t)
      if ((mask >> t) & 1) c[straddled[t]] = 0.0;
    candidates.push_back(c);
  }

  Node node;
  for (const Vec& c : candidates) {
    double need2 = 0.0;
    for (int i = 0; i < m; ++i) {
      double d = std::max(std::abs(elo[i] - c[i]), std::abs(ehi[i] - c[i]));
      need2 += d * d;
    }
    const double need = std::sqrt(need2) * (1.0 + 1e-12);
    const double r = 4.0 * need;
    if (!(r < delta_)) continue;
    // The containment is monotone in the radius, so testing r = 4·need
    // decides whether the largest admissible r_x reaches it.
    Polytope here = evaluate(spec_, c);
    Polytope around = enclose_box(spec_, c.array() - r, c.array() + r);
    bool ok = true;
    for (int k = 0; k < around.size() && ok; ++k)
      if (here.distance(around.vertex(k)) > delta_ * (1.0 - 1e-9)) ok = false;
    if (!ok) continue;
    node.leaf = true;
    node.ball = CoverBall{c, need, r, lo, hi};
    return node;
  }
  if (key.level >= opt_.max_depth)
    fail(ErrorCode::resolution, "Lipschitz cover exceeded its refinement depth; use a larger delta");
  return node;
}

const LipschitzApproximation::Node& LipschitzApproximation::node(const Key& key) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Node n = build(key);
  std::lock_guard<std::mutex> lock(mu_);
  if (cache_.size() >= opt_.ball_budget)
    fail(ErrorCode::resolution, "Lipschitz cover exceeded its ball budget; use a larger delta");
  return cache_.emplace(key, std::move(n)).first->second;
}

std::size_t LipschitzApproximation::materialized() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

void LipschitzApproximation::visit(const Key& key, const Vec& x, std::vector<CoverBall>& balls,
                                   std::vector<double>& phi) const {
  Vec lo, hi;
  box_of(key, lo, hi);
  const double side = hi[0] - lo[0];
  const double margin = 0.25 * side;
  double weight = 1.0;
  for (int i = 0; i < dim(); ++i) {
    double d = std::max({lo[i] - x[i], x[i] - hi[i], 0.0});
    if (d >= margin) return;
    weight *= 1.0 - d / margin;
  }
  const Node& n = node(key);
  if (n.leaf) {
    if (weight > 0) {
      balls.push_back(n.ball);
      phi.push_back(weight);
    }
    return;
  }
  Key child{key.level + 1, std::vector<std::int64_t>(dim())};
  for (int mask = 0; mask < (1 << dim()); ++mask) {
    for (int i = 0; i < dim(); ++i) child.idx[i] = 2 * key.idx[i] + ((mask >> i) & 1);
    visit(child, x, balls, phi);
  }
}

std::vector<CoverBall> LipschitzApproximation::active(const Vec& x, std::vector<double>* weights) const {
  if (x.size() != dim()) fail(ErrorCode::dimension_mismatch, "query point has wrong dimension");
  for (int i = 0; i < dim(); ++i)
    if (!(std::abs(x[i]) <= R_)) fail(ErrorCode::invalid_argument, "query point outside the covered ball");
  const int m = dim();
  std::vector<std::int64_t> first(m), last(m);
  for (int i = 0; i < m; ++i) {
    double u = (x[i] + R_) / pitch_;
    first[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(u - 0.25)), 0, roots_per_axis_ - 1);
    last[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(u + 0.25)), 0, roots_per_axis_ - 1);
  }
  std::vector<CoverBall> balls;
  std::vector<double> phi;
  Key key{0, first};
  for (;;) {
    visit(key, x, balls, phi);
    int i = 0;
    for (; i < m; ++i) {
      if (key.idx[i] < last[i]) { ++key.idx[i]; break; }
      key.idx[i] = first[i];
    }
    if (i == m) break;
  }
  double total = 0.0;
  for (double p : phi) total += p;
  if (!(total > 0)) fail(ErrorCode::invariant_violation, "partition of unity vanished at a covered point");
  if (weights) {
    weights->resize(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) (*weights)[k] = phi[k] / total;
  }
  return balls;
}

Polytope LipschitzApproximation::value(const Vec& x) const {
  std::vector<double> w;
  std::vector<CoverBall> balls = active(x, &w);
  const int m = dim();
  if (!spec_.has_regions()) {
    // Each ball value is the image of (box × sign intervals) under one fixed
    // affine map, so the weighted Minkowski sum is the image of the weighted
    // box and intervals.
    const auto& coords = spec_.switch_coords();
    const auto& gains = spec_.switch_gains();
    Vec lo = Vec::Zero(m), hi = Vec::Zero(m);
    Vec slo = Vec::Zero(static_cast<Eigen::Index>(coords.size()));
    Vec shi = slo;
    for (std::size_t b = 0; b < balls.size(); ++b) {
      Vec blo = balls[b].center.array() - balls[b].radius;
      Vec bhi = balls[b].center.array() + balls[b].radius;
      lo += w[b] * blo;
      hi += w[b] * bhi;
      for (std::size_t j = 0; j < coords.size(); ++j) {
        int i = coords[j];
        double a = blo[i] > 0 ? 1.0 : (bhi[i] < 0 ? -1.0 : -1.0);
        double c = bhi[i] < 0 ? -1.0 : (blo[i] > 0 ? 1.0 : 1.0);
        slo[j] += w[b] * a;
        shi[j] += w[b] * c;
      }
    }
    Mat corners = Polytope::box(lo, hi).vertices();
    const int k = static_cast<int>(coords.size());
    Mat v(m, corners.cols() << k);
    Eigen::Index col = 0;
    for (Eigen::Index c = 0; c < corners.cols(); ++c) {
      Vec base = spec_.A() * corners.col(c) + spec_.c();
      for (int mask = 0; mask < (1 << k); ++mask) {
        Vec p = base;
        for (int t = 0; t < k; ++t) p += ((mask >> t) & 1 ? shi[t] : slo[t]) * gains[t];
        v.col(col++) = p;
      }
    }
    return Polytope(std::move(v)).deduplicated();
  }
  // General regions: the hull of the ball values contains their weighted sum.
  Polytope out = enclose_box(spec_, balls[0].center.array() - balls[0].radius,
                             balls[0].center.array() + balls[0].radius);
  for (std::size_t b = 1; b < balls.size(); ++b)
    out = out.hull_with(enclose_box(spec_, balls[b].center.array() - balls[b].radius,
                                    balls[b].center.array() + balls[b].radius));
  return out;
}

std::shared_ptr<LipschitzApproximation> lipschitz_approximation(const SetValuedMapSpec& spec,
                                                                double delta, double R,
                                                                const LipschitzOptions& opt) {
  return std::make_shared<LipschitzApproximation>(spec, delta, R, opt);
}

SandwichResult check_sandwich(const LipschitzApproximation& approx, const Vec& x, double tol) {
  SandwichResult r;
  Polytope fl = approx.value(x);
  r.lower = fl.contains(evaluate(approx.spec(), x), tol);
  InflationParams params;
  params.delta = approx.delta();
  r.upper = inflate(approx.spec(), params, x).contains(fl, tol);
  return r;
}

}  // namespace dimorse
