#include "dimorse/set_valued_map.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace dimorse {

SetValuedMapSpec::SetValuedMapSpec(Mat A, Vec c, std::vector<SwitchingTerm> switches,
                                   std::vector<PiecewiseRegion> regions)
    : A_(std::move(A)), c_(std::move(c)), switches_(std::move(switches)), regions_(std::move(regions)) {
  dim_ = static_cast<int>(A_.rows());
  if (dim_ <= 0) fail(ErrorCode::malformed_spec, "map dimension must be positive");
  if (A_.cols() != dim_) fail(ErrorCode::malformed_spec, "affine matrix must be square");
  if (c_.size() != dim_) fail(ErrorCode::malformed_spec, "offset length differs from dimension");
  if (!A_.allFinite() || !c_.allFinite()) fail(ErrorCode::malformed_spec, "affine part is not finite");
  std::map<int, Vec> combined;
  for (const auto& s : switches_) {
    if (s.coord < 0 || s.coord >= dim_) fail(ErrorCode::malformed_spec, "switching coordinate out of range");
    if (s.gain.size() != dim_) fail(ErrorCode::malformed_spec, "switching gain has wrong length");
    if (!s.gain.allFinite()) fail(ErrorCode::malformed_spec, "switching gain is not finite");
    auto it = combined.find(s.coord);
    if (it == combined.end()) combined.emplace(s.coord, s.gain);
    else it->second += s.gain;
  }
  for (auto& [coord, gain] : combined) {
    coords_.push_back(coord);
    gains_.push_back(gain);
  }
  for (const auto& r : regions_) {
    if (r.normals.cols() != dim_ || r.normals.rows() != r.offsets.size())
      fail(ErrorCode::malformed_spec, "region halfspaces have inconsistent shape");
    if (r.generators.empty()) fail(ErrorCode::malformed_spec, "region needs at least one generator");
    for (const auto& g : r.generators)
      if (g.matrix.rows() != dim_ || g.matrix.cols() != dim_ || g.offset.size() != dim_)
        fail(ErrorCode::malformed_spec, "region generator has wrong shape");
  }
}

SetValuedMapSpec SetValuedMapSpec::chua(double alpha, double beta, double b, double k) {
  Mat A(3, 3);
  A << -alpha * (b + 1.0), alpha, 0.0,
       1.0, -1.0, 1.0,
       0.0, -beta, 0.0;
  // A·(x1 − k·s, x2, x3 + k·s) = A·x + s·k·A·(−1, 0, 1).
  Vec dir(3);
  dir << -1.0, 0.0, 1.0;
  SwitchingTerm term{0, k * (A * dir)};
  return SetValuedMapSpec(A, Vec::Zero(3), {term});
}

namespace {

void check_point(const SetValuedMapSpec& spec, const Vec& x) {
  if (x.size() != spec.dim())
    fail(ErrorCode::dimension_mismatch, "point dimension " + std::to_string(x.size()) +
                                            " differs from map dimension " + std::to_string(spec.dim()));
  if (!x.allFinite()) fail(ErrorCode::invalid_argument, "point is not finite");
}

double region_tol(const PiecewiseRegion& r, int row, const Vec& x) {
  return 1e-12 * (1.0 + std::abs(r.offsets[row]) + r.normals.row(row).norm() * x.norm());
}

// Region term R(x) as a vertex list, or an empty matrix when no regions exist.
Mat region_term(const SetValuedMapSpec& spec, const Vec& x) {
  const auto& regions = spec.regions();
  std::vector<int> hits;
  bool any_interior = false;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& reg = regions[r];
    bool inside = true;
    bool on_boundary = false;
    for (Eigen::Index row = 0; row < reg.normals.rows(); ++row) {
      double lhs = reg.normals.row(row).dot(x);
      double tol = region_tol(reg, static_cast<int>(row), x);
      if (lhs > reg.offsets[row] + tol) { inside = false; break; }
      if (lhs >= reg.offsets[row] - tol) on_boundary = true;
    }
    if (!inside) continue;
    hits.push_back(static_cast<int>(r));
    if (!on_boundary) any_interior = true;
  }
  if (hits.empty()) fail(ErrorCode::malformed_spec, "no region covers the evaluation point");
  if (hits.size() > 1 && any_interior)
    fail(ErrorCode::malformed_spec, "regions overlap ambiguously at the evaluation point");
  std::size_t count = 0;
  for (int r : hits) count += regions[r].generators.size();
  Mat v(spec.dim(), static_cast<Eigen::Index>(count));
  Eigen::Index col = 0;
  for (int r : hits)
    for (const auto& g : regions[r].generators) v.col(col++) = g.matrix * x + g.offset;
  return v;
}

Mat minkowski_columns(const Mat& a, const Mat& b) {
  Mat out(a.rows(), a.cols() * b.cols());
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) out.col(c++) = a.col(i) + b.col(j);
  return out;
}

}  // namespace

Vec affine_value(const SetValuedMapSpec& spec, const Vec& x, const Vec& signs) {
  Vec v = spec.A() * x + spec.c();
  for (std::size_t j = 0; j < spec.switch_coords().size(); ++j) v += signs[j] * spec.switch_gains()[j];
  return v;
}

Polytope evaluate(const SetValuedMapSpec& spec, const Vec& x) {
  check_point(spec, x);
  const auto& coords = spec.switch_coords();
  const auto& gains = spec.switch_gains();
  Vec base = spec.A() * x + spec.c();
  std::vector<int> on_surface;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    double xi = x[coords[j]];
    if (xi > 0) base += gains[j];
    else if (xi < 0) base -= gains[j];
    else on_surface.push_back(static_cast<int>(j));
  }
  const int k = static_cast<int>(on_surface.size());
  Mat v(spec.dim(), 1 << k);
  for (int mask = 0; mask < (1 << k); ++mask) {
    Vec p = base;
    for (int t = 0; t < k; ++t) p += ((mask >> t) & 1 ? 1.0 : -1.0) * gains[on_surface[t]];
    v.col(mask) = p;
  }
  if (spec.has_regions()) v = minkowski_columns(v, region_term(spec, x));
  return Polytope(std::move(v)).deduplicated();
}

Polytope enclose_box(const SetValuedMapSpec& spec, const Vec& lo, const Vec& hi) {
  check_point(spec, lo);
  check_point(spec, hi);
  const int m = spec.dim();
  const auto& coords = spec.switch_coords();
  const auto& gains = spec.switch_gains();
  Vec base = spec.c();
  std::vector<int> free;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    int i = coords[j];
    if (lo[i] > 0) base += gains[j];
    else if (hi[i] < 0) base -= gains[j];
    else free.push_back(static_cast<int>(j));
  }
  Mat corners = Polytope::box(lo, hi).vertices();
  const int k = static_cast<int>(free.size());
  Mat v(m, corners.cols() << k);
  Eigen::Index col = 0;
  for (Eigen::Index c = 0; c < corners.cols(); ++c) {
    Vec ax = spec.A() * corners.col(c) + base;
    for (int mask = 0; mask < (1 << k); ++mask) {
      Vec p = ax;
      for (int t = 0; t < k; ++t) p += ((mask >> t) & 1 ? 1.0 : -1.0) * gains[free[t]];
      v.col(col++) = p;
    }
  }
  if (spec.has_regions()) {
    // Any region whose halfspaces each meet the box may contribute; this keeps
    // the enclosure outer without solving a feasibility problem.
    std::vector<Vec> pts;
    for (const auto& reg : spec.regions()) {
      bool meets = true;
      for (Eigen::Index row = 0; row < reg.normals.rows() && meets; ++row) {
        double lowest = 0.0;
        for (int i = 0; i < m; ++i) {
          double n = reg.normals(row, i);
          lowest += n >= 0 ? n * lo[i] : n * hi[i];
        }
        if (lowest > reg.offsets[row] + 1e-12 * (1.0 + std::abs(reg.offsets[row]))) meets = false;
      }
      if (!meets) continue;
      for (const auto& g : reg.generators)
        for (Eigen::Index c = 0; c < corners.cols(); ++c) pts.push_back(g.matrix * corners.col(c) + g.offset);
    }
    if (pts.empty()) fail(ErrorCode::malformed_spec, "no region meets the enclosure box");
    Mat r(m, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t t = 0; t < pts.size(); ++t) r.col(static_cast<Eigen::Index>(t)) = pts[t];
    r = Polytope(r).deduplicated().vertices();
    v = minkowski_columns(v, r);
  }
  return Polytope(std::move(v)).deduplicated();
}

namespace {

struct NetInfo {
  Mat points;       // unit vectors, columns
  double cos_theta;  // conv(points) contains the ball of this radius
  double max_pair_angle;
};

NetInfo build_net(int m, double slack) {
  NetInfo info;
  if (m == 1) {
    info.points = Mat(1, 2);
    info.points << -1.0, 1.0;
    info.cos_theta = 1.0;
    info.max_pair_angle = M_PI;
    return info;
  }
  // Face grid with n intervals per edge: any direction is within angle
  // asin(sqrt(m-1)/n) of a grid direction.
  const double need = std::sqrt(std::max(1e-12, 1.0 - 1.0 / ((1.0 + slack) * (1.0 + slack))));
  int n = std::max(1, static_cast<int>(std::ceil(std::sqrt(m - 1.0) / need)));
  double d = std::sqrt(m - 1.0) / n;
  while (d >= 0.999) {
    ++n;
    d = std::sqrt(m - 1.0) / n;
  }
  std::vector<Vec> pts;
  const int per_face = static_cast<int>(std::pow(n + 1, m - 1));
  for (int axis = 0; axis < m; ++axis) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      for (int idx = 0; idx < per_face; ++idx) {
        Vec p(m);
        int rem = idx;
        for (int i = 0; i < m; ++i) {
          if (i == axis) { p[i] = sgn; continue; }
          int k = rem % (n + 1);
          rem /= (n + 1);
          p[i] = -1.0 + 2.0 * k / n;
        }
        // Shared edges of faces: keep the copy on the face with the lowest axis
        // carrying a ±1 coordinate, so each point appears once.
        bool dup = false;
        for (int i = 0; i < axis; ++i)
          if (std::abs(std::abs(p[i]) - 1.0) == 0.0) { dup = true; break; }
        if (!dup) pts.push_back(p.normalized());
      }
    }
  }
  info.points = Mat(m, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) info.points.col(static_cast<Eigen::Index>(i)) = pts[i];
  info.cos_theta = std::sqrt(1.0 - d * d);
  // Vertices of a common facet lie within twice the covering angle.
  info.max_pair_angle = 2.0 * std::asin(d) * 1.02 + 1e-9;
  return info;
}

const NetInfo& net_info(int m, double slack) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, NetInfo> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(m, slack);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_net(m, slack)).first;
  return it->second;
}

// Clips conv(points) by {sigma·y_i >= 0}. When `pairs_local` is set, only
// pairs within the given angle (around `center`) are intersected, which is
// exact for the hull of a sphere net because edges join nearby points.
std::vector<Vec> clip(const std::vector<Vec>& pts, int i, double sigma, const Vec& center,
                      double pair_angle) {
  std::vector<Vec> out;
  std::vector<int> pos, neg;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    double s = sigma * pts[a][i];
    if (s >= 0) out.push_back(pts[a]);
    if (s > 0) pos.push_back(static_cast<int>(a));
    else if (s < 0) neg.push_back(static_cast<int>(a));
  }
  const double cos_lim = std::cos(std::min(pair_angle, M_PI));
  for (int a : pos) {
    Vec da = pts[a] - center;
    double na = da.norm();
    for (int b : neg) {
      if (pair_angle < M_PI) {
        Vec db = pts[b] - center;
        double nb = db.norm();
        if (na > 0 && nb > 0 && da.dot(db) < cos_lim * na * nb) continue;
      }
      double t = pts[a][i] / (pts[a][i] - pts[b][i]);
      Vec q = pts[a] + t * (pts[b] - pts[a]);
      q[i] = 0.0;
      out.push_back(q);
    }
  }
  return out;
}

}  // namespace

const Mat& sphere_net(int m, double slack) { return net_info(m, slack).points; }

Polytope inflate(const SetValuedMapSpec& spec, const InflationParams& params, const Vec& x) {
  if (!(params.delta >= 0.0) || !std::isfinite(params.delta))
    fail(ErrorCode::invalid_argument, "inflation radius must be nonnegative");
  if (!(params.slack > 0.0)) fail(ErrorCode::invalid_argument, "inflation slack must be positive");
  check_point(spec, x);
  if (params.delta == 0.0) return evaluate(spec, x);

  const int m = spec.dim();
  const NetInfo& net = net_info(m, params.slack);
  const double delta = params.delta;
  const double radius = delta / net.cos_theta;  // <= delta·(1+slack)
  const auto& coords = spec.switch_coords();
  const auto& gains = spec.switch_gains();

  std::vector<int> near;  // switch indices whose surface the ball can reach
  Vec fixed = spec.c();
  for (std::size_t j = 0; j < coords.size(); ++j) {
    double xi = x[coords[j]];
    if (std::abs(xi) <= radius) near.push_back(static_cast<int>(j));
    else fixed += (xi > 0 ? 1.0 : -1.0) * gains[j];
  }

  std::vector<Vec> ball;
  ball.reserve(static_cast<std::size_t>(net.points.cols()));
  for (Eigen::Index k = 0; k < net.points.cols(); ++k) ball.push_back(x + radius * net.points.col(k));

  std::vector<Vec> values;
  const int k = static_cast<int>(near.size());
  for (int mask = 0; mask < (1 << k); ++mask) {
    std::vector<Vec> piece = ball;
    Vec shift = fixed;
    for (int t = 0; t < k && !piece.empty(); ++t) {
      double sigma = (mask >> t) & 1 ? 1.0 : -1.0;
      shift += sigma * gains[near[t]];
      piece = clip(piece, coords[near[t]], sigma, x, t == 0 ? net.max_pair_angle : M_PI);
      if (piece.size() > 1) {
        Mat tmp(m, static_cast<Eigen::Index>(piece.size()));
        for (std::size_t a = 0; a < piece.size(); ++a) tmp.col(static_cast<Eigen::Index>(a)) = piece[a];
        Mat dedup = Polytope(tmp).deduplicated().vertices();
        piece.clear();
        for (Eigen::Index a = 0; a < dedup.cols(); ++a) piece.push_back(dedup.col(a));
      }
    }
    for (const Vec& q : piece) values.push_back(spec.A() * q + shift);
  }
  Mat v(m, static_cast<Eigen::Index>(values.size()));
  for (std::size_t a = 0; a < values.size(); ++a) v.col(static_cast<Eigen::Index>(a)) = values[a];
  if (spec.has_regions()) {
    Vec lo = x.array() - radius;
    Vec hi = x.array() + radius;
    SetValuedMapSpec region_only(Mat::Zero(m, m), Vec::Zero(m), {}, spec.regions());
    v = minkowski_columns(v, enclose_box(region_only, lo, hi).vertices());
  }
  return Polytope(std::move(v), delta).deduplicated();
}

}  // namespace dimorse
