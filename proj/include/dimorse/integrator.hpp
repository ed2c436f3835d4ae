#pragma once

#include "dimorse/selection.hpp"

#include <vector>

namespace dimorse {

struct IntegratorOptions {
  double blowup_bound = 1e6;     // sup-norm bound that signals divergence
  int max_events_per_step = 64;  // cap on surface events inside one step
};

struct Trajectory {
  double h = 0.0;
  std::vector<double> times;
  std::vector<Vec> states;
  // False when every evaluated value was a single point, i.e. the trajectory
  // is the same for every selection strategy.
  bool selection_dependent = false;
};

// Fixed-step classic Runge-Kutta integration of x' = g(x). Steps that cross a
// coordinate switching surface are bisected in time to within h·1e-3 of the
// crossing; on the surface the one-sided normal velocities decide between
// crossing, Filippov sliding, or (on repelling surfaces) the selection's own
// choice of side. Raises divergence when the state leaves the blow-up bound.
Trajectory integrate(const SelectionField& g, const Vec& x0, double T, double h,
                     const IntegratorOptions& opt = {});

struct Endpoint {
  Vec x;
  bool diverged = false;
  bool selection_dependent = false;
};

// Final states only, for many starting points. Uses the batched vector
// kernel for affine-plus-switching right-hand sides; divergence is reported
// per endpoint instead of raised.
std::vector<Endpoint> integrate_endpoints(const SelectionField& g, const std::vector<Vec>& starts,
                                          double T, double h, const IntegratorOptions& opt = {});

// Same contract, always using the scalar single-trajectory path. Kept as the
// reference for equivalence tests of the batched kernel.
std::vector<Endpoint> integrate_endpoints_reference(const SelectionField& g,
                                                    const std::vector<Vec>& starts, double T,
                                                    double h, const IntegratorOptions& opt = {});

}  // namespace dimorse
