#include "dimorse/kernels/kernels.hpp"

namespace dimorse::kernels {

void xor_words_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t words) {
  for (std::size_t w = 0; w < words; ++w) dst[w] ^= src[w];
}

}  // namespace dimorse::kernels
