#include "dimorse/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace dimorse::kernels {

namespace {

Isa detect() {
  const char* env = std::getenv("DIMORSE_ISA");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<int>& isa_slot() {
  static std::atomic<int> slot{static_cast<int>(detect())};
  return slot;
}

}  // namespace

bool avx2_available() {
#if defined(DIMORSE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return static_cast<Isa>(isa_slot().load(std::memory_order_relaxed)); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  isa_slot().store(static_cast<int>(isa));
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void affine_rk4_x4(int m, const double* A, const double* x, const double* shift, double h, double* out) {
#if defined(DIMORSE_HAVE_AVX2)
  if (active_isa() == Isa::avx2) {
    affine_rk4_x4_avx2(m, A, x, shift, h, out);
    return;
  }
#endif
  affine_rk4_x4_scalar(m, A, x, shift, h, out);
}

void xor_words(std::uint64_t* dst, const std::uint64_t* src, std::size_t words) {
#if defined(DIMORSE_HAVE_AVX2)
  if (active_isa() == Isa::avx2) {
    xor_words_avx2(dst, src, words);
    return;
  }
#endif
  xor_words_scalar(dst, src, words);
}

#if !defined(DIMORSE_HAVE_AVX2)
void affine_rk4_x4_avx2(int m, const double* A, const double* x, const double* shift, double h, double* out) {
  affine_rk4_x4_scalar(m, A, x, shift, h, out);
}
void xor_words_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t words) {
  xor_words_scalar(dst, src, words);
}
#endif

}  // namespace dimorse::kernels
