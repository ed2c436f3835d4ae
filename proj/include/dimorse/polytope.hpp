#pragma once

#include "dimorse/common.hpp"

namespace dimorse {

// Convex compact set conv(V) + r·B, where V is a finite vertex list (columns)
// and r >= 0 an optional Euclidean padding radius. With r = 0 this is an
// ordinary V-polytope; the padded form keeps inflated values compact without
// enumerating a Minkowski sum with a ball approximation.
class Polytope {
 public:
  Polytope() = default;
  explicit Polytope(Mat vertices, double padding = 0.0);

  static Polytope point(const Vec& p);
  static Polytope segment(const Vec& a, const Vec& b);
  static Polytope box(const Vec& lo, const Vec& hi);

  int dim() const { return static_cast<int>(v_.rows()); }
  int size() const { return static_cast<int>(v_.cols()); }
  bool empty() const { return v_.cols() == 0; }
  const Mat& vertices() const { return v_; }
  Vec vertex(int k) const { return v_.col(k); }
  double padding() const { return pad_; }

  bool is_singleton(double tol = 0.0) const;
  Vec centroid() const;
  // Euclidean projection of y onto the set.
  Vec nearest_point(const Vec& y) const;
  double distance(const Vec& y) const;
  // Membership up to tol scaled by the magnitude of the data.
  bool contains(const Vec& y, double tol = 1e-9) const;
  // Set inclusion `inner ⊆ *this`, exact for padded polytopes up to tol.
  bool contains(const Polytope& inner, double tol = 1e-9) const;
  double support(const Vec& direction) const;
  double scale() const;

  Polytope translated(const Vec& t) const;
  Polytope minkowski_sum(const Polytope& other) const;
  Polytope hull_with(const Polytope& other) const;
  Polytope with_padding(double r) const { return Polytope(v_, r); }
  // Removes repeated vertices (bitwise equal up to tol in sup norm).
  Polytope deduplicated(double tol = 0.0) const;

 private:
  Mat v_;
  double pad_ = 0.0;
};

// Minimum-norm point of conv(columns of P) by Wolfe's method. Optionally
// returns the convex weights of the final combination.
Vec min_norm_point(const Mat& P, Vec* weights = nullptr);

}  // namespace dimorse
