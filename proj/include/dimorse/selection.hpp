#pragma once

#include "dimorse/set_valued_map.hpp"

#include <memory>
#include <optional>
#include <string>

namespace dimorse {

// A set-valued right-hand side that can be queried pointwise.
class RightHandSide {
 public:
  virtual ~RightHandSide() = default;
  virtual int dim() const = 0;
  virtual Polytope value(const Vec& x) const = 0;
  // Set when the right-hand side is exactly affine plus coordinate switching.
  // Integrators then use surface event handling and the batched kernels.
  virtual const SetValuedMapSpec* switching_spec() const { return nullptr; }
};

class SpecRhs final : public RightHandSide {
 public:
  explicit SpecRhs(SetValuedMapSpec spec) : spec_(std::move(spec)) {}
  int dim() const override { return spec_.dim(); }
  Polytope value(const Vec& x) const override { return evaluate(spec_, x); }
  const SetValuedMapSpec* switching_spec() const override {
    return spec_.has_regions() ? nullptr : &spec_;
  }
  const SetValuedMapSpec& spec() const { return spec_; }

 private:
  SetValuedMapSpec spec_;
};

class InflatedRhs final : public RightHandSide {
 public:
  InflatedRhs(SetValuedMapSpec spec, InflationParams params)
      : spec_(std::move(spec)), params_(params) {}
  int dim() const override { return spec_.dim(); }
  Polytope value(const Vec& x) const override { return inflate(spec_, params_, x); }
  const SetValuedMapSpec* switching_spec() const override {
    return params_.delta == 0.0 && !spec_.has_regions() ? &spec_ : nullptr;
  }

 private:
  SetValuedMapSpec spec_;
  InflationParams params_;
};

enum class Strategy { vertex_index, centroid, random_convex, closest_to_target };

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

struct Selection {
  Strategy strategy = Strategy::centroid;
  std::uint64_t seed = 0;
  int vertex = 0;               // vertex_index only
  std::optional<Vec> target;    // closest_to_target; zero when absent
};

// Single-valued field g with g(x) ∈ F(x).
class SelectionField {
 public:
  SelectionField(std::shared_ptr<const RightHandSide> rhs, Selection sel);

  int dim() const { return rhs_->dim(); }
  const RightHandSide& rhs() const { return *rhs_; }
  const Selection& selection() const { return sel_; }

  Vec operator()(const Vec& x) const { return choose(rhs_->value(x), x); }
  // Applies the strategy to an already evaluated value at x.
  Vec choose(const Polytope& value, const Vec& x) const;

 private:
  std::shared_ptr<const RightHandSide> rhs_;
  Selection sel_;
};

SelectionField make_selection(const SetValuedMapSpec& spec, const Selection& sel);

}  // namespace dimorse
