#pragma once

#include "dimorse/polytope.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dimorse {

// g · Sgn(x_coord) added to the right-hand side; Sgn(0) = [-1, 1].
struct SwitchingTerm {
  int coord = 0;
  Vec gain;
};

// x ↦ matrix·x + offset, one vertex generator of a region value.
struct AffineGenerator {
  Mat matrix;
  Vec offset;
};

// Closed polyhedral region {x : normals·x <= offsets} whose value is the
// convex hull of its generators evaluated at x.
struct PiecewiseRegion {
  Mat normals;
  Vec offsets;
  std::vector<AffineGenerator> generators;
};

// F(x) = A·x + c + Σ g_j·Sgn(x_{i_j}) ⊕ R(x), where R(x) is the region term
// (the point {0} when no regions are given).
class SetValuedMapSpec {
 public:
  SetValuedMapSpec() = default;
  SetValuedMapSpec(Mat A, Vec c, std::vector<SwitchingTerm> switches = {},
                   std::vector<PiecewiseRegion> regions = {});

  int dim() const { return dim_; }
  const Mat& A() const { return A_; }
  const Vec& c() const { return c_; }
  const std::vector<SwitchingTerm>& switches() const { return switches_; }
  const std::vector<PiecewiseRegion>& regions() const { return regions_; }

  bool has_regions() const { return !regions_.empty(); }
  // Coordinates carrying a switching term, ascending, with gains summed.
  const std::vector<int>& switch_coords() const { return coords_; }
  const std::vector<Vec>& switch_gains() const { return gains_; }

  static SetValuedMapSpec chua(double alpha, double beta, double b, double k);

 private:
  int dim_ = 0;
  Mat A_;
  Vec c_;
  std::vector<SwitchingTerm> switches_;
  std::vector<PiecewiseRegion> regions_;
  std::vector<int> coords_;
  std::vector<Vec> gains_;
};

// Value of F at x. Raises dimension_mismatch or malformed_spec.
Polytope evaluate(const SetValuedMapSpec& spec, const Vec& x);

// Affine+switching part only, with an explicit sign choice per switch
// coordinate (entries in [-1, 1]); region terms are not included.
Vec affine_value(const SetValuedMapSpec& spec, const Vec& x, const Vec& signs);

// Outer polytope of F(box) for the axis box [lo, hi].
Polytope enclose_box(const SetValuedMapSpec& spec, const Vec& lo, const Vec& hi);

struct InflationParams {
  double delta = 0.0;
  double slack = 0.05;
};

// Outer value of the inflated right-hand side con F(x+δB̄) + δB̄.
Polytope inflate(const SetValuedMapSpec& spec, const InflationParams& params, const Vec& x);

// Unit vectors whose convex hull contains the ball of radius 1/(1+slack).
// Built from a grid on the faces of the unit cube; cached per (m, slack).
const Mat& sphere_net(int m, double slack);

}  // namespace dimorse
