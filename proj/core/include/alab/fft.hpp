#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace alab {

using cplx = std::complex<double>;

// Multidimensional DFT on a cubic grid of side `side` in dimension `d`,
// row-major layout (last coordinate fastest).
//
// Convention (shared by every module):
//   forward:  f̂(ξ_k) = Σ_x e^{+i x·ξ_k} f(x),   ξ_k = 2π k / side
//   inverse:  f(x)  = side^{-d} Σ_k e^{-i x·ξ_k} f̂(ξ_k)
//
// Plans are cached per (d, side); execution uses per-call buffers and is safe
// to invoke concurrently from multiple threads.
namespace fft {

void forward(int d, int side, std::vector<cplx>& data);
void inverse(int d, int side, std::vector<cplx>& data);

}  // namespace fft

}  // namespace alab
