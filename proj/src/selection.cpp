#include "dimorse/selection.hpp"

#include <cmath>

namespace dimorse {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::vertex_index: return "vertex-index";
    case Strategy::centroid: return "centroid";
    case Strategy::random_convex: return "random-convex";
    case Strategy::closest_to_target: return "closest-to-target";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "vertex-index") return Strategy::vertex_index;
  if (name == "centroid") return Strategy::centroid;
  if (name == "random-convex") return Strategy::random_convex;
  if (name == "closest-to-target" || name == "closest-to-zero") return Strategy::closest_to_target;
  fail(ErrorCode::config, "unknown selection strategy '" + name + "'");
}

SelectionField::SelectionField(std::shared_ptr<const RightHandSide> rhs, Selection sel)
    : rhs_(std::move(rhs)), sel_(std::move(sel)) {
  if (!rhs_) fail(ErrorCode::invalid_argument, "selection needs a right-hand side");
  if (sel_.target && sel_.target->size() != rhs_->dim())
    fail(ErrorCode::dimension_mismatch, "selection target has wrong dimension");
}

Vec SelectionField::choose(const Polytope& value, const Vec& x) const {
  if (value.is_singleton()) return value.vertex(0);
  switch (sel_.strategy) {
    case Strategy::vertex_index: {
      int n = value.size();
      int k = ((sel_.vertex % n) + n) % n;
      return value.vertex(k);
    }
    case Strategy::centroid:
      return value.centroid();
    case Strategy::random_convex: {
      CounterRng rng(sel_.seed, hash_point(x));
      const int n = value.size();
      Vec w(n);
      for (int k = 0; k < n; ++k) w[k] = -std::log(rng.uniform_open());
      w /= w.sum();
      Vec out = value.vertices() * w;
      if (value.padding() > 0.0) {
        Vec dir(value.dim());
        for (int i = 0; i < value.dim(); ++i) dir[i] = rng.normal();
        double nd = dir.norm();
        if (nd > 0) {
          double r = value.padding() * std::pow(rng.uniform(), 1.0 / value.dim());
          out += (r / nd) * dir;
        }
      }
      return out;
    }
    case Strategy::closest_to_target: {
      Vec target = sel_.target ? *sel_.target : Vec::Zero(value.dim());
      return value.nearest_point(target);
    }
  }
  return value.centroid();
}

SelectionField make_selection(const SetValuedMapSpec& spec, const Selection& sel) {
  return SelectionField(std::make_shared<SpecRhs>(spec), sel);
}

}  // namespace dimorse
