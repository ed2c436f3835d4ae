#include "dimorse/kernels/kernels.hpp"

#include <immintrin.h>

namespace dimorse::kernels {

void xor_words_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t words) {
  std::size_t w = 0;
  for (; w + 4 <= words; w += 4) {
    __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + w));
    __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + w));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + w), _mm256_xor_si256(a, b));
  }
  for (; w < words; ++w) dst[w] ^= src[w];
}

}  // namespace dimorse::kernels
