#pragma once

#include "dimorse/selection.hpp"

#include <memory>
#include <mutex>
#include <unordered_map>

namespace dimorse {

struct LipschitzOptions {
  double slack = 0.05;              // inflation slack of the comparison set
  std::size_t ball_budget = 4'000'000;
  int max_depth = 30;               // refinement levels below the root grid
};

// One ball of the cover: center, radius used by the cover, and the radius
// r_x found by the search (the cover radius never exceeds r_x / 4).
struct CoverBall {
  Vec center;
  double radius = 0.0;
  double r_x = 0.0;
  Vec box_lo, box_hi;  // leaf box whose expanded copy supports the weight
};

// Locally Lipschitz outer approximation F_L of an upper semicontinuous F on
// the ball of radius R. The cover is the leaf set of a box tree rooted at a
// grid of pitch δ/4; a leaf is accepted once some candidate center x_i admits
// a radius r_i with F(B̄(x_i, r_i)) ⊆ F(x_i) + δB̄ whose quarter covers the
// leaf's support. The cover is built lazily around queried points, so only
// the part of the tree near those points is ever materialized.
class LipschitzApproximation final : public RightHandSide {
 public:
  LipschitzApproximation(SetValuedMapSpec spec, double delta, double R, LipschitzOptions opt = {});

  int dim() const override { return spec_.dim(); }
  Polytope value(const Vec& x) const override;

  // Cover balls with positive weight at x, and their normalized weights.
  std::vector<CoverBall> active(const Vec& x, std::vector<double>* weights) const;
  std::size_t materialized() const;

  double delta() const { return delta_; }
  double radius() const { return R_; }
  const SetValuedMapSpec& spec() const { return spec_; }

 private:
  struct Node {
    bool leaf = false;
    CoverBall ball;
  };
  struct Key {
    int level;
    std::vector<std::int64_t> idx;
    bool operator==(const Key& o) const { return level == o.level && idx == o.idx; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  const Node& node(const Key& key) const;
  Node build(const Key& key) const;
  void visit(const Key& key, const Vec& x, std::vector<CoverBall>& balls,
             std::vector<double>& phi) const;
  void box_of(const Key& key, Vec& lo, Vec& hi) const;

  SetValuedMapSpec spec_;
  double delta_;
  double R_;
  LipschitzOptions opt_;
  double pitch_;
  std::int64_t roots_per_axis_;
  mutable std::mutex mu_;
  mutable std::unordered_map<Key, Node, KeyHash> cache_;
};

std::shared_ptr<LipschitzApproximation> lipschitz_approximation(const SetValuedMapSpec& spec,
                                                                double delta, double R,
                                                                const LipschitzOptions& opt = {});

struct SandwichResult {
  bool lower = false;  // F(x) ⊆ F_L(x)
  bool upper = false;  // F_L(x) ⊆ inflate(δ, x)
  bool ok() const { return lower && upper; }
};

SandwichResult check_sandwich(const LipschitzApproximation& approx, const Vec& x, double tol = 1e-9);

}  // namespace dimorse
