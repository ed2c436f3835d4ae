#include "dimorse/kernels/kernels.hpp"

#include <immintrin.h>

namespace dimorse::kernels {

namespace {

inline void field4(int m, const double* A, const __m256d* y, const __m256d* shift, __m256d* out) {
  for (int i = 0; i < m; ++i) {
    const double* row = A + i * m;
    __m256d acc = _mm256_mul_pd(_mm256_set1_pd(row[0]), y[0]);
    for (int j = 1; j < m; ++j) acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(row[j]), y[j]));
    out[i] = _mm256_add_pd(acc, shift[i]);
  }
}

}  // namespace

void affine_rk4_x4_avx2(int m, const double* A, const double* x, const double* shift, double h,
                        double* out) {
  __m256d xv[kMaxDim], sv[kMaxDim], k1[kMaxDim], k2[kMaxDim], k3[kMaxDim], k4[kMaxDim], y[kMaxDim];
  for (int i = 0; i < m; ++i) {
    xv[i] = _mm256_loadu_pd(x + i * kLanes);
    sv[i] = _mm256_loadu_pd(shift + i * kLanes);
  }
  const __m256d hv = _mm256_set1_pd(h);
  const __m256d hh = _mm256_set1_pd(0.5 * h);
  const __m256d h6 = _mm256_set1_pd(h / 6.0);
  const __m256d two = _mm256_set1_pd(2.0);
  field4(m, A, xv, sv, k1);
  for (int i = 0; i < m; ++i) y[i] = _mm256_add_pd(xv[i], _mm256_mul_pd(hh, k1[i]));
  field4(m, A, y, sv, k2);
  for (int i = 0; i < m; ++i) y[i] = _mm256_add_pd(xv[i], _mm256_mul_pd(hh, k2[i]));
  field4(m, A, y, sv, k3);
  for (int i = 0; i < m; ++i) y[i] = _mm256_add_pd(xv[i], _mm256_mul_pd(hv, k3[i]));
  field4(m, A, y, sv, k4);
  for (int i = 0; i < m; ++i) {
    __m256d s = _mm256_add_pd(k1[i], _mm256_mul_pd(two, k2[i]));
    s = _mm256_add_pd(s, _mm256_mul_pd(two, k3[i]));
    s = _mm256_add_pd(s, k4[i]);
    _mm256_storeu_pd(out + i * kLanes, _mm256_add_pd(xv[i], _mm256_mul_pd(h6, s)));
  }
}

}  // namespace dimorse::kernels
