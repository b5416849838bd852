#pragma once

#include "gl3v/special_fn_types.hpp"

#include <vector>

namespace gl3v {

// In-place FFT: sign -1 gives sum_j a_j e^{-2 pi i jk/n}, sign +1 the conjugate kernel.
// Unnormalized. Plan creation is serialized; execution is reentrant.
void fft_inplace(std::vector<cplx>& a, int sign);

} // namespace gl3v
