#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fhkam::kernels {

using Cplx = std::complex<double>;

// Direct discrete Fourier sums on uniform grids.  `forward` produces the
// 2*order+1 coefficients c_n = (1/M) sum_j samples[j] e^{-2 pi i n j / M}
// for n = -order..order (M = samples.size()); `inverse` evaluates the series
// on a grid of the requested size.
//
// The `_serial` variants are the reference implementation; the `_parallel`
// variants distribute output entries across OpenMP threads.  Every output
// entry is an independent pairwise sum with a fixed association order, so the
// two variants agree bit for bit at any thread count.
std::vector<Cplx> dft_forward_serial(const std::vector<Cplx>& samples, int order);
std::vector<Cplx> dft_forward_parallel(const std::vector<Cplx>& samples, int order);
std::vector<Cplx> dft_inverse_serial(const std::vector<Cplx>& coeffs, int grid);
std::vector<Cplx> dft_inverse_parallel(const std::vector<Cplx>& coeffs, int grid);

// cascade summation with a fixed association order (error O(log n) ulp)
Cplx pairwise_sum(const Cplx* data, std::size_t n);

} // namespace fhkam::kernels
