#include "dimorse/integrator.hpp"

#include "dimorse/kernels/kernels.hpp"

#include <array>
#include <cmath>

namespace dimorse {

namespace {

inline int sgn(double v) { return (v > 0) - (v < 0); }

int step_count(double T, double h) {
  if (!(T > 0) || !(h > 0) || !std::isfinite(T) || !std::isfinite(h))
    fail(ErrorCode::invalid_argument, "integration needs T > 0 and h > 0");
  if (h > T) fail(ErrorCode::invalid_argument, "integration step exceeds horizon");
  double n = std::ceil(T / h - 1e-9);
  if (n > 1e9) fail(ErrorCode::invalid_argument, "too many integration steps");
  return std::max(1, static_cast<int>(n));
}

// Event-aware stepper for affine right-hand sides with coordinate switching.
class SwitchStepper {
 public:
  SwitchStepper(const SelectionField& g, const SetValuedMapSpec& spec, double h,
                const IntegratorOptions& opt)
      : g_(g), spec_(spec), m_(spec.dim()), h_(h), opt_(opt) {
    A_.resize(static_cast<std::size_t>(m_) * m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) A_[i * m_ + j] = spec.A()(i, j);
    coords_ = spec.switch_coords();
    ns_ = static_cast<int>(coords_.size());
    for (const Vec& g : spec.switch_gains()) gains_.push_back(g);
  }

  int dim() const { return m_; }
  const double* A() const { return A_.data(); }

  void shift_for(const int* sigma, double* out) const {
    for (int i = 0; i < m_; ++i) {
      double s = spec_.c()[i];
      for (int j = 0; j < ns_; ++j) s = s + static_cast<double>(sigma[j]) * gains_[j][i];
      out[i] = s;
    }
  }

  // Sign pattern at x; returns false when some switching coordinate is zero.
  bool signs(const double* x, int* sigma) const {
    bool off = true;
    for (int j = 0; j < ns_; ++j) {
      sigma[j] = sgn(x[coords_[j]]);
      if (sigma[j] == 0) off = false;
    }
    return off;
  }

  bool same_side(const double* y, const int* sigma) const {
    for (int j = 0; j < ns_; ++j)
      if (sgn(y[coords_[j]]) != sigma[j]) return false;
    return true;
  }

  bool acceptable(const double* y) const {
    for (int i = 0; i < m_; ++i)
      if (!std::isfinite(y[i]) || std::abs(y[i]) > opt_.blowup_bound) return false;
    return true;
  }

  void check_bound(const double* y) const {
    if (!acceptable(y)) fail(ErrorCode::divergence, "trajectory exceeded the blow-up bound");
  }

  // Advances x by dt, handling every surface event inside the step.
  void step(double* x, double dt, bool& dep) const {
    double remaining = dt;
    int events = 0;
    std::vector<int> sigma(ns_), side(ns_);
    while (remaining > 0) {
      if (signs(x, sigma.data())) {
        if (plain_advance(x, sigma.data(), remaining, events)) return;
        continue;
      }
      dep = true;
      bool any_slide = false;
      for (int j = 0; j < ns_; ++j) {
        side[j] = sigma[j];
        if (sigma[j] == 0) {
          side[j] = decide(x, sigma.data(), j);
          if (side[j] == 0) any_slide = true;
        }
      }
      if (any_slide && events < opt_.max_events_per_step) {
        if (slide_advance(x, side.data(), remaining, events)) return;
        continue;
      }
      if (any_slide) {
        for (int j = 0; j < ns_; ++j)
          if (side[j] == 0) side[j] = normal_velocity(x, sigma.data(), j, 0.0) >= 0 ? 1 : -1;
      }
      if (plain_advance(x, side.data(), remaining, events)) return;
    }
  }

 private:
  void rk4(const double* x, const int* sigma, double dt, double* out) const {
    double shift[kernels::kMaxDim];
    shift_for(sigma, shift);
    kernels::affine_rk4(m_, A_.data(), x, shift, dt, out);
  }

  // Plain step on the side pattern sigma, or up to the first crossing.
  bool plain_advance(double* x, const int* sigma, double& remaining, int& events) const {
    double y[kernels::kMaxDim];
    rk4(x, sigma, remaining, y);
    if (same_side(y, sigma) && std::isfinite(y[0])) {
      check_bound(y);
      std::copy(y, y + m_, x);
      remaining = 0;
      return true;
    }
    if (++events > opt_.max_events_per_step) {
      check_bound(y);
      std::copy(y, y + m_, x);
      remaining = 0;
      return true;
    }
    double lo = 0.0, hi = remaining;
    const double tmin = h_ * 1e-3;
    while (hi - lo > tmin) {
      double mid = 0.5 * (lo + hi);
      rk4(x, sigma, mid, y);
      if (acceptable(y) && same_side(y, sigma)) lo = mid;
      else hi = mid;
    }
    double yhi[kernels::kMaxDim];
    rk4(x, sigma, hi, yhi);
    check_bound(yhi);
    if (lo > 0) {
      rk4(x, sigma, lo, y);
      std::copy(y, y + m_, x);
    }
    for (int j = 0; j < ns_; ++j)
      if (sgn(yhi[coords_[j]]) != sigma[j]) x[coords_[j]] = 0.0;
    remaining -= lo;
    return false;
  }

  // Normal velocity of coordinate j's surface when its own sign is s.
  double normal_velocity(const double* x, const int* sigma, int j, double s) const {
    const int i = coords_[j];
    double r = spec_.c()[i];
    for (int k = 0; k < m_; ++k) r += A_[i * m_ + k] * x[k];
    for (int k = 0; k < ns_; ++k)
      if (k != j) r += sigma[k] * gains_[k][i];
    return r + s * gains_[j][i];
  }

  int decide(const double* x, const int* sigma, int j) const {
    const int i = coords_[j];
    double a = normal_velocity(x, sigma, j, 1.0);
    double b = normal_velocity(x, sigma, j, -1.0);
    const double eps = 1e-12 * (std::abs(a) + std::abs(b) + 1e-300);
    int pa = a > eps ? 1 : (a < -eps ? -1 : 0);
    int pb = b > eps ? 1 : (b < -eps ? -1 : 0);
    if (pa > 0 && pb > 0) return 1;
    if (pa < 0 && pb < 0) return -1;
    if (pa <= 0 && pb >= 0) return 0;  // attracting, or tangent on one side
    // Repelling: both sides are admissible, and so is sliding. The
    // selection's own value at the surface point picks one.
    Vec xv = Eigen::Map<const Vec>(x, m_);
    Vec v = g_.choose(evaluate(spec_, xv), xv);
    const double tol = 1e-9 * (std::abs(a) + std::abs(b));
    if (v[i] > tol) return 1;
    if (v[i] < -tol) return -1;
    return 0;
  }

  // Filippov sliding velocity on the surfaces with side == 0.
  bool slide_field(const double* y_in, const int* side, double* out) const {
    double y[kernels::kMaxDim];
    std::copy(y_in, y_in + m_, y);
    std::array<int, kernels::kMaxDim> zs{};
    int nz = 0;
    for (int j = 0; j < ns_; ++j)
      if (side[j] == 0) {
        y[coords_[j]] = 0.0;
        zs[nz++] = j;
      }
    Vec r(m_);
    for (int i = 0; i < m_; ++i) {
      double acc = spec_.c()[i];
      for (int k = 0; k < m_; ++k) acc += A_[i * m_ + k] * y[k];
      for (int j = 0; j < ns_; ++j)
        if (side[j] != 0) acc += side[j] * gains_[j][i];
      r[i] = acc;
    }
    Mat M(nz, nz);
    Vec rhs(nz);
    for (int a = 0; a < nz; ++a) {
      rhs[a] = -r[coords_[zs[a]]];
      for (int b = 0; b < nz; ++b) M(a, b) = gains_[zs[b]][coords_[zs[a]]];
    }
    Eigen::FullPivLU<Mat> lu(M);
    if (!lu.isInvertible()) return false;
    Vec s = lu.solve(rhs);
    for (int a = 0; a < nz; ++a)
      if (!(std::abs(s[a]) <= 1.0 + 1e-9)) return false;
    for (int a = 0; a < nz; ++a) r += s[a] * gains_[zs[a]];
    for (int a = 0; a < nz; ++a) r[coords_[zs[a]]] = 0.0;
    for (int i = 0; i < m_; ++i) out[i] = r[i];
    return true;
  }

  bool slide_rk4(const double* x, const int* side, double dt, double* out) const {
    double k1[kernels::kMaxDim], k2[kernels::kMaxDim], k3[kernels::kMaxDim], k4[kernels::kMaxDim],
        y[kernels::kMaxDim];
    if (!slide_field(x, side, k1)) return false;
    for (int i = 0; i < m_; ++i) y[i] = x[i] + 0.5 * dt * k1[i];
    if (!slide_field(y, side, k2)) return false;
    for (int i = 0; i < m_; ++i) y[i] = x[i] + 0.5 * dt * k2[i];
    if (!slide_field(y, side, k3)) return false;
    for (int i = 0; i < m_; ++i) y[i] = x[i] + dt * k3[i];
    if (!slide_field(y, side, k4)) return false;
    for (int i = 0; i < m_; ++i) out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (int j = 0; j < ns_; ++j) {
      if (side[j] == 0) out[coords_[j]] = 0.0;
      else if (sgn(out[coords_[j]]) != side[j]) return false;
    }
    double probe[kernels::kMaxDim];
    return acceptable(out) && slide_field(out, side, probe);
  }

  bool slide_advance(double* x, const int* side, double& remaining, int& events) const {
    double y[kernels::kMaxDim];
    if (slide_rk4(x, side, remaining, y)) {
      check_bound(y);
      std::copy(y, y + m_, x);
      remaining = 0;
      return true;
    }
    ++events;
    double lo = 0.0, hi = remaining;
    const double tmin = h_ * 1e-3;
    while (hi - lo > tmin) {
      double mid = 0.5 * (lo + hi);
      if (slide_rk4(x, side, mid, y)) lo = mid;
      else hi = mid;
    }
    if (lo == 0.0) {
      // Sliding is not sustainable even briefly; leave along the normal velocity.
      std::vector<int> s(side, side + ns_), sig(ns_);
      signs(x, sig.data());
      for (int j = 0; j < ns_; ++j)
        if (s[j] == 0) s[j] = normal_velocity(x, sig.data(), j, 0.0) >= 0 ? 1 : -1;
      events = opt_.max_events_per_step;
      return plain_advance(x, s.data(), remaining, events);
    }
    slide_rk4(x, side, lo, y);
    std::copy(y, y + m_, x);
    // Coordinates that were about to cross land on their surface.
    double yhi[kernels::kMaxDim];
    double kk[kernels::kMaxDim];
    if (slide_field(x, side, kk)) {
      for (int i = 0; i < m_; ++i) yhi[i] = x[i] + (hi - lo) * kk[i];
      for (int j = 0; j < ns_; ++j)
        if (side[j] != 0 && sgn(yhi[coords_[j]]) != side[j]) x[coords_[j]] = 0.0;
    }
    remaining -= lo;
    return false;
  }

  const SelectionField& g_;
  const SetValuedMapSpec& spec_;
  int m_;
  double h_;
  IntegratorOptions opt_;
  std::vector<double> A_;
  std::vector<int> coords_;
  std::vector<Vec> gains_;
  int ns_ = 0;
};

// Classic Runge-Kutta on a general selection; no event location.
struct GenericStepper {
  const SelectionField& g;
  IntegratorOptions opt;

  Vec eval(const Vec& x, bool& dep) const {
    Polytope p = g.rhs().value(x);
    if (!p.is_singleton()) dep = true;
    return g.choose(p, x);
  }

  void step(Vec& x, double dt, bool& dep) const {
    Vec k1 = eval(x, dep);
    Vec k2 = eval(x + 0.5 * dt * k1, dep);
    Vec k3 = eval(x + 0.5 * dt * k2, dep);
    Vec k4 = eval(x + dt * k3, dep);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > opt.blowup_bound)
      fail(ErrorCode::divergence, "trajectory exceeded the blow-up bound");
  }
};

bool use_switch_stepper(const SelectionField& g) {
  const SetValuedMapSpec* spec = g.rhs().switching_spec();
  return spec && spec->dim() <= kernels::kMaxDim;
}

}  // namespace

Trajectory integrate(const SelectionField& g, const Vec& x0, double T, double h,
                     const IntegratorOptions& opt) {
  if (x0.size() != g.dim()) fail(ErrorCode::dimension_mismatch, "initial state has wrong dimension");
  if (!x0.allFinite()) fail(ErrorCode::invalid_argument, "initial state is not finite");
  const int n = step_count(T, h);
  Trajectory tr;
  tr.h = h;
  tr.times.reserve(n + 1);
  tr.states.reserve(n + 1);
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  bool dep = false;
  Vec x = x0;
  if (use_switch_stepper(g)) {
    SwitchStepper st(g, *g.rhs().switching_spec(), h, opt);
    for (int k = 0; k < n; ++k) {
      double dt = k + 1 < n ? h : T - (n - 1) * h;
      st.step(x.data(), dt, dep);
      tr.times.push_back(k + 1 < n ? (k + 1) * h : T);
      tr.states.push_back(x);
    }
  } else {
    GenericStepper st{g, opt};
    for (int k = 0; k < n; ++k) {
      double dt = k + 1 < n ? h : T - (n - 1) * h;
      st.step(x, dt, dep);
      tr.times.push_back(k + 1 < n ? (k + 1) * h : T);
      tr.states.push_back(x);
    }
  }
  tr.selection_dependent = dep;
  return tr;
}

std::vector<Endpoint> integrate_endpoints_reference(const SelectionField& g,
                                                    const std::vector<Vec>& starts, double T,
                                                    double h, const IntegratorOptions& opt) {
  const int n = step_count(T, h);
  const double last = T - (n - 1) * h;
  std::vector<Endpoint> out(starts.size());
  const bool sw = use_switch_stepper(g);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    if (starts[s].size() != g.dim()) fail(ErrorCode::dimension_mismatch, "start has wrong dimension");
    Vec x = starts[s];
    bool dep = false;
    try {
      if (sw) {
        SwitchStepper st(g, *g.rhs().switching_spec(), h, opt);
        for (int k = 0; k < n; ++k) st.step(x.data(), k + 1 < n ? h : last, dep);
      } else {
        GenericStepper st{g, opt};
        for (int k = 0; k < n; ++k) st.step(x, k + 1 < n ? h : last, dep);
      }
      out[s] = Endpoint{x, false, dep};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::divergence) throw;
      out[s] = Endpoint{x, true, dep};
    }
  }
  return out;
}

std::vector<Endpoint> integrate_endpoints(const SelectionField& g, const std::vector<Vec>& starts,
                                          double T, double h, const IntegratorOptions& opt) {
  if (!use_switch_stepper(g)) return integrate_endpoints_reference(g, starts, T, h, opt);
  const int n = step_count(T, h);
  const double last = T - (n - 1) * h;
  const SwitchStepper st(g, *g.rhs().switching_spec(), h, opt);
  const int m = st.dim();
  constexpr int L = kernels::kLanes;
  std::vector<Endpoint> out(starts.size());
  const int ns = static_cast<int>(g.rhs().switching_spec()->switch_coords().size());

  for (std::size_t base = 0; base < starts.size(); base += L) {
    const int lanes = static_cast<int>(std::min<std::size_t>(L, starts.size() - base));
    double x[L][kernels::kMaxDim] = {};
    int k[L] = {};
    bool dep[L] = {};
    bool dead[L] = {};
    for (int l = 0; l < lanes; ++l) {
      const Vec& s = starts[base + l];
      if (s.size() != m) fail(ErrorCode::dimension_mismatch, "start has wrong dimension");
      for (int i = 0; i < m; ++i) x[l][i] = s[i];
      if (!st.acceptable(x[l])) dead[l] = true;
    }
    double X[kernels::kMaxDim * L], S[kernels::kMaxDim * L], O[kernels::kMaxDim * L];
    std::vector<int> lane_sigma(static_cast<std::size_t>(ns) * L);
    for (;;) {
      bool any = false;
      int plain = 0;
      std::fill(std::begin(X), std::end(X), 0.0);
      std::fill(std::begin(S), std::end(S), 0.0);
      for (int l = 0; l < lanes; ++l) {
        if (dead[l] || k[l] >= n) continue;
        any = true;
        double dt = k[l] + 1 < n ? h : last;
        if (dt != h) continue;
        int* sg = lane_sigma.data() + l * ns;
        if (!st.signs(x[l], sg)) continue;
        double shift[kernels::kMaxDim];
        st.shift_for(sg, shift);
        for (int i = 0; i < m; ++i) {
          X[i * L + l] = x[l][i];
          S[i * L + l] = shift[i];
        }
        plain |= 1 << l;
      }
      if (!any) break;
      if (plain) kernels::affine_rk4_x4(m, st.A(), X, S, h, O);
      for (int l = 0; l < lanes; ++l) {
        if (dead[l] || k[l] >= n) continue;
        if (plain & (1 << l)) {
          double y[kernels::kMaxDim];
          for (int i = 0; i < m; ++i) y[i] = O[i * L + l];
          if (st.same_side(y, lane_sigma.data() + l * ns) && st.acceptable(y)) {
            std::copy(y, y + m, x[l]);
            ++k[l];
            continue;
          }
        }
        try {
          st.step(x[l], k[l] + 1 < n ? h : last, dep[l]);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::divergence) throw;
          dead[l] = true;
        }
        ++k[l];
      }
    }
    for (int l = 0; l < lanes; ++l) {
      Endpoint e;
      e.x = Eigen::Map<Vec>(x[l], m);
      e.diverged = dead[l];
      e.selection_dependent = dep[l];
      out[base + l] = std::move(e);
    }
  }
  return out;
}

}  // namespace dimorse
