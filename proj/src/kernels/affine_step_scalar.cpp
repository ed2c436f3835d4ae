#include "dimorse/kernels/kernels.hpp"

namespace dimorse::kernels {

namespace {

inline void field(int m, const double* A, const double* y, const double* shift, double* out) {
  for (int i = 0; i < m; ++i) {
    const double* row = A + i * m;
    double acc = row[0] * y[0];
    for (int j = 1; j < m; ++j) acc = acc + row[j] * y[j];
    out[i] = acc + shift[i];
  }
}

}  // namespace

void affine_rk4(int m, const double* A, const double* x, const double* shift, double h, double* out) {
  double k1[kMaxDim], k2[kMaxDim], k3[kMaxDim], k4[kMaxDim], y[kMaxDim];
  const double hh = 0.5 * h;
  const double h6 = h / 6.0;
  field(m, A, x, shift, k1);
  for (int i = 0; i < m; ++i) y[i] = x[i] + hh * k1[i];
  field(m, A, y, shift, k2);
  for (int i = 0; i < m; ++i) y[i] = x[i] + hh * k2[i];
  field(m, A, y, shift, k3);
  for (int i = 0; i < m; ++i) y[i] = x[i] + h * k3[i];
  field(m, A, y, shift, k4);
  for (int i = 0; i < m; ++i) out[i] = x[i] + h6 * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]);
}

void affine_rk4_x4_scalar(int m, const double* A, const double* x, const double* shift, double h,
                          double* out) {
  double xs[kMaxDim], ss[kMaxDim], os[kMaxDim];
  for (int lane = 0; lane < kLanes; ++lane) {
    for (int i = 0; i < m; ++i) {
      xs[i] = x[i * kLanes + lane];
      ss[i] = shift[i * kLanes + lane];
    }
    affine_rk4(m, A, xs, ss, h, os);
    for (int i = 0; i < m; ++i) out[i * kLanes + lane] = os[i];
  }
}

}  // namespace dimorse::kernels
