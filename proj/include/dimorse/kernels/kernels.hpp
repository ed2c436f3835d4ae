#pragma once

#include <cstddef>
#include <cstdint>

// Hot loops with a scalar reference version and an AVX2 version chosen at
// run time. Both versions perform the same floating-point operations in the
// same order, so their results are bitwise identical.
namespace dimorse::kernels {

constexpr int kMaxDim = 4;
constexpr int kLanes = 4;

enum class Isa { scalar, avx2 };

bool avx2_available();
// The environment variable DIMORSE_ISA=scalar disables the vector path.
Isa active_isa();
void force_isa(Isa isa);
const char* isa_name(Isa isa);

// One classic Runge-Kutta step of y' = A·y + shift (A row-major m×m).
void affine_rk4(int m, const double* A, const double* x, const double* shift, double h, double* out);

// Four independent steps in structure-of-arrays layout: x[i*4 + lane].
void affine_rk4_x4_scalar(int m, const double* A, const double* x, const double* shift, double h,
                          double* out);
void affine_rk4_x4_avx2(int m, const double* A, const double* x, const double* shift, double h,
                        double* out);
void affine_rk4_x4(int m, const double* A, const double* x, const double* shift, double h, double* out);

// dst ^= src over `words` 64-bit words.
void xor_words_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t words);
void xor_words_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t words);
void xor_words(std::uint64_t* dst, const std::uint64_t* src, std::size_t words);

}  // namespace dimorse::kernels
