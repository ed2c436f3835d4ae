#include "dimorse/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dimorse {

Polytope::Polytope(Mat vertices, double padding) : v_(std::move(vertices)), pad_(padding) {
  if (v_.cols() == 0) fail(ErrorCode::invalid_argument, "polytope needs at least one vertex");
  if (!v_.allFinite()) fail(ErrorCode::invalid_argument, "polytope vertex is not finite");
  if (!(pad_ >= 0.0) || !std::isfinite(pad_))
    fail(ErrorCode::invalid_argument, "polytope padding must be finite and nonnegative");
}

Polytope Polytope::point(const Vec& p) {
  Mat m(p.size(), 1);
  m.col(0) = p;
  return Polytope(std::move(m));
}

Polytope Polytope::segment(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) fail(ErrorCode::dimension_mismatch, "segment endpoints differ in dimension");
  Mat m(a.size(), 2);
  m.col(0) = a;
  m.col(1) = b;
  return Polytope(std::move(m));
}

Polytope Polytope::box(const Vec& lo, const Vec& hi) {
  const int m = static_cast<int>(lo.size());
  const int n = 1 << m;
  Mat v(m, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < m; ++i) v(i, k) = (k >> i) & 1 ? hi[i] : lo[i];
  return Polytope(std::move(v)).deduplicated();
}

bool Polytope::is_singleton(double tol) const {
  if (pad_ > tol) return false;
  for (int k = 1; k < size(); ++k)
    if ((v_.col(k) - v_.col(0)).lpNorm<Eigen::Infinity>() > tol) return false;
  return true;
}

Vec Polytope::centroid() const { return v_.rowwise().mean(); }

double Polytope::scale() const {
  double s = v_.lpNorm<Eigen::Infinity>();
  return std::max(s, pad_);
}

Vec min_norm_point(const Mat& P, Vec* weights) {
  const int n = static_cast<int>(P.cols());
  if (n == 1) {
    if (weights) *weights = Vec::Ones(1);
    return P.col(0);
  }
  const double max_norm2 = P.colwise().squaredNorm().maxCoeff();
  const double eps_major = 1e-13 * std::max(max_norm2, 1e-300);

  std::vector<int> S;
  std::vector<double> lam;
  int j0 = 0;
  P.colwise().squaredNorm().minCoeff(&j0);
  S.push_back(j0);
  lam.push_back(1.0);
  Vec x = P.col(j0);

  auto recompute_x = [&] {
    x.setZero(P.rows());
    for (std::size_t a = 0; a < S.size(); ++a) x += lam[a] * P.col(S[a]);
  };

  const int max_major = 50 * n + 100;
  for (int iter = 0; iter < max_major; ++iter) {
    Eigen::RowVectorXd dots = x.transpose() * P;
    int j = 0;
    double best = dots.minCoeff(&j);
    if (x.squaredNorm() - best <= eps_major) break;
    if (std::find(S.begin(), S.end(), j) != S.end()) break;
    S.push_back(j);
    lam.push_back(0.0);

    for (int minor = 0; minor < 4 * n + 10; ++minor) {
      const int s = static_cast<int>(S.size());
      Mat B = Mat::Zero(s + 1, s + 1);
      for (int a = 0; a < s; ++a) {
        for (int b = a; b < s; ++b) {
          double g = P.col(S[a]).dot(P.col(S[b]));
          B(a, b) = g;
          B(b, a) = g;
        }
        B(a, s) = 1.0;
        B(s, a) = 1.0;
      }
      Vec rhs = Vec::Zero(s + 1);
      rhs[s] = 1.0;
      Vec sol = B.completeOrthogonalDecomposition().solve(rhs);
      Vec alpha = sol.head(s);
      const double sum = alpha.sum();
      if (std::abs(sum) > 1e-300) alpha /= sum;

      const double eps_w = 1e-12;
      if ((alpha.array() > eps_w).all()) {
        for (int a = 0; a < s; ++a) lam[a] = alpha[a];
        recompute_x();
        break;
      }
      double theta = 1.0;
      for (int a = 0; a < s; ++a) {
        if (alpha[a] <= eps_w) {
          double denom = lam[a] - alpha[a];
          if (denom > 0) theta = std::min(theta, lam[a] / denom);
        }
      }
      for (int a = 0; a < s; ++a) lam[a] = theta * alpha[a] + (1.0 - theta) * lam[a];
      // Drop the points whose weight vanished.
      std::vector<int> S2;
      std::vector<double> lam2;
      for (int a = 0; a < s; ++a) {
        if (lam[a] > eps_w) {
          S2.push_back(S[a]);
          lam2.push_back(lam[a]);
        }
      }
      if (S2.empty()) {  // numerically degenerate; keep the newest point
        S2.push_back(S.back());
        lam2.push_back(1.0);
      }
      double total = std::accumulate(lam2.begin(), lam2.end(), 0.0);
      for (double& l : lam2) l /= total;
      S = std::move(S2);
      lam = std::move(lam2);
      recompute_x();
    }
  }
  if (weights) {
    *weights = Vec::Zero(n);
    for (std::size_t a = 0; a < S.size(); ++a) (*weights)[S[a]] += lam[a];
  }
  return x;
}

Vec Polytope::nearest_point(const Vec& y) const {
  if (y.size() != v_.rows()) fail(ErrorCode::dimension_mismatch, "projection point has wrong dimension");
  Mat shifted = v_.colwise() - y;
  Vec q = min_norm_point(shifted) + y;
  if (pad_ > 0.0) {
    Vec d = y - q;
    double nd = d.norm();
    if (nd <= pad_) return y;
    return q + (pad_ / nd) * d;
  }
  return q;
}

double Polytope::distance(const Vec& y) const {
  if (y.size() != v_.rows()) fail(ErrorCode::dimension_mismatch, "distance point has wrong dimension");
  if (size() == 1) return std::max(0.0, (y - v_.col(0)).norm() - pad_);
  Mat shifted = v_.colwise() - y;
  return std::max(0.0, min_norm_point(shifted).norm() - pad_);
}

bool Polytope::contains(const Vec& y, double tol) const {
  const double s = 1.0 + std::max(scale(), y.lpNorm<Eigen::Infinity>());
  return distance(y) <= tol * s;
}

bool Polytope::contains(const Polytope& inner, double tol) const {
  if (inner.dim() != dim()) fail(ErrorCode::dimension_mismatch, "polytope inclusion across dimensions");
  const double s = 1.0 + std::max(scale(), inner.scale());
  for (int k = 0; k < inner.size(); ++k) {
    Mat shifted = v_.colwise() - inner.v_.col(k);
    double d = size() == 1 ? shifted.col(0).norm() : min_norm_point(shifted).norm();
    if (d > pad_ - inner.pad_ + tol * s) return false;
  }
  return true;
}

double Polytope::support(const Vec& direction) const {
  return (direction.transpose() * v_).maxCoeff() + pad_ * direction.norm();
}

Polytope Polytope::translated(const Vec& t) const {
  Mat m = v_.colwise() + t;
  return Polytope(std::move(m), pad_);
}

Polytope Polytope::minkowski_sum(const Polytope& other) const {
  if (other.dim() != dim()) fail(ErrorCode::dimension_mismatch, "Minkowski sum across dimensions");
  Mat m(dim(), static_cast<Eigen::Index>(size()) * other.size());
  int c = 0;
  for (int a = 0; a < size(); ++a)
    for (int b = 0; b < other.size(); ++b) m.col(c++) = v_.col(a) + other.v_.col(b);
  return Polytope(std::move(m), pad_ + other.pad_).deduplicated();
}

Polytope Polytope::hull_with(const Polytope& other) const {
  if (other.dim() != dim()) fail(ErrorCode::dimension_mismatch, "hull across dimensions");
  if (other.pad_ != pad_) {
    // Pad both to the larger radius; still an outer set for the hull.
    const double r = std::max(pad_, other.pad_);
    Mat m(dim(), size() + other.size());
    m << v_, other.v_;
    return Polytope(std::move(m), r).deduplicated();
  }
  Mat m(dim(), size() + other.size());
  m << v_, other.v_;
  return Polytope(std::move(m), pad_).deduplicated();
}

Polytope Polytope::deduplicated(double tol) const {
  const int n = size();
  if (n <= 1) return *this;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](int a, int b) {
    for (int i = 0; i < dim(); ++i) {
      if (v_(i, a) < v_(i, b)) return true;
      if (v_(i, a) > v_(i, b)) return false;
    }
    return a < b;
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<int> keep;
  for (int idx : order) {
    bool dup = false;
    if (tol == 0.0) {
      dup = !keep.empty() && (v_.col(keep.back()).array() == v_.col(idx).array()).all();
    } else {
      for (int k : keep)
        if ((v_.col(k) - v_.col(idx)).lpNorm<Eigen::Infinity>() <= tol) { dup = true; break; }
    }
    if (!dup) keep.push_back(idx);
  }
  std::sort(keep.begin(), keep.end());
  Mat m(dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = v_.col(keep[k]);
  return Polytope(std::move(m), pad_);
}

}  // namespace dimorse
