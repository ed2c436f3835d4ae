#pragma once

#include "dimorse/morse.hpp"

#include <string>

namespace dimorse {

// Smooth weight that vanishes near an attractor: 0 within δ/2 of the hull
// box, 1 beyond δ, with the C∞ transition ψ(t) = f(t)/(f(t)+f(1-t)),
// f(t) = exp(-1/t), in between.
class BumpAlpha {
 public:
  BumpAlpha(Vec hull_lo, Vec hull_hi, double delta);
  static BumpAlpha of_cells(const CubicalGrid& grid, const CellSet& cells, double delta);

  double operator()(const Vec& x) const;
  bool in_zero_zone(const Vec& x) const { return distance(x) <= 0.5 * delta_; }
  double distance(const Vec& x) const;
  double delta() const { return delta_; }

 private:
  Vec lo_, hi_;
  double delta_;
};

// ψ on [0, 1], 0 below and 1 above.
double smooth_step(double t);

struct IntegralOptions {
  double h = 1e-3;
  double dwell = 1.0;  // time spent in the zero zone before the integral stops
  IntegratorOptions integrator;
};

// max over n_selections sampled solutions of ∫ e^t α(x(t)) dt (trapezoid),
// stopped once the solution has stayed a full dwell time in the α ≡ 0 zone.
// Selection 0 is closest-to-zero; selection j > 0 is random-convex with a
// seed derived from (seed, j). Raises truncation_unsound when some solution
// has not completed its dwell by time T.
double integral_lyapunov(std::shared_ptr<const RightHandSide> rhs, const BumpAlpha& alpha, const Vec& x,
                         double T, int n_selections, std::uint64_t seed, const IntegralOptions& opt = {});
double integral_lyapunov(const SetValuedMapSpec& spec, const BumpAlpha& alpha, const Vec& x, double T,
                         int n_selections, std::uint64_t seed, const IntegralOptions& opt = {});

struct LyapunovField {
  std::string mode = "graph";
  CellSet region;              // cells with a finite basin index
  std::vector<double> V;       // per graph cell, NaN outside the region
  std::vector<double> w;       // per graph cell, NaN outside the region
  std::vector<double> levels;  // c_k for k = 1..l
  std::vector<int> morse_index;
  double step = 0.0;           // value quantum 1/(L + 1), a lower bound for every w on transient cells
  int longest_path = 0;

  bool defined(std::int32_t c) const { return V[c] == V[c]; }
};

// V = (κ - 1) + ℓ/(L + 1), where κ is the basin index, ℓ the longest path of
// transient cells of the same basin index ending next to lower values, and L
// the largest ℓ; Morse cells have ℓ = 0. Raises invariant_violation when an
// edge increases the basin index or a transient cell is recurrent.
LyapunovField graph_ml_function(const MorseDecomposition& d, const TransitionGraph& g);

// Multilinear interpolation of the cell-centered values at x.
double interpolate(const LyapunovField& f, const CubicalGrid& grid, const Vec& x);

struct CertificateReport {
  std::size_t requested = 0;
  std::size_t evaluated = 0;
  std::size_t passed = 0;
  double tolerance = 0.0;
  double worst_margin = 0.0;  // max of (max_v ∇V·v + w) over evaluated samples
  double pass_rate() const { return evaluated ? static_cast<double>(passed) / evaluated : 0.0; }
};

// Samples uniform points of the transient region and checks
// max_{v ∈ F(x)} ∇V(x)·v <= -w(x) + tol·max_{v ∈ F(x)} |v|, with ∇V from
// central differences at half a cell width. tol is a slope (value per state
// unit); a negative tol selects slope_unit().
CertificateReport decrease_certificate(const LyapunovField& f, const SetValuedMapSpec& spec,
                                       const TransitionGraph& g, std::size_t n_samples, std::uint64_t seed,
                                       double tol = -1.0, bool include_morse = false);

// One value quantum (the smallest strict decrease) per cell width.
double slope_unit(const LyapunovField& f, const CubicalGrid& grid);

CellSet sublevel(const LyapunovField& f, double a);

std::string lyapunov_csv(const LyapunovField& f, const TransitionGraph& g);
std::string lyapunov_json(const LyapunovField& f, const CertificateReport* cert);

}  // namespace dimorse
