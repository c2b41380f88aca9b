#include "fhkam/kernels.hpp"

#include "fhkam/errors.hpp"

#include <cmath>

namespace fhkam::kernels {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

// e^{2 pi i k / M} with k reduced into [0, M) so the trig argument is small
// and identical wherever it is computed
Cplx unit_root(long long k, long long M) {
    long long r = k % M;
    if (r < 0) r += M;
    double ang = two_pi * static_cast<double>(r) / static_cast<double>(M);
    return {std::cos(ang), std::sin(ang)};
}

void check_forward(const std::vector<Cplx>& samples, int order) {
    if (order < 0 || static_cast<long long>(samples.size()) < 2LL * order + 1)
        throw DomainViolation("strip_fourier", "size-mismatch",
            "forward transform: grid must hold at least 2*order+1 samples");
}

int check_inverse(const std::vector<Cplx>& coeffs, int grid) {
    if (coeffs.size() % 2 == 0 || coeffs.empty())
        throw DomainViolation("strip_fourier", "size-mismatch",
            "inverse transform: coefficient list must have odd length");
    const int order = static_cast<int>(coeffs.size() / 2);
    if (grid < 2 * order + 1)
        throw DomainViolation("strip_fourier", "size-mismatch",
            "inverse transform: grid must hold at least 2*order+1 samples");
    return order;
}

// one output coefficient: fixed-order pairwise sum over the grid
Cplx forward_entry(const std::vector<Cplx>& samples, long long n) {
    const long long M = static_cast<long long>(samples.size());
    std::vector<Cplx> terms(samples.size());
    for (long long j = 0; j < M; ++j)
        terms[j] = samples[j] * unit_root(-n * j, M);
    return pairwise_sum(terms.data(), terms.size()) / static_cast<double>(M);
}

// one output sample
Cplx inverse_entry(const std::vector<Cplx>& coeffs, int order, long long grid, long long j) {
    std::vector<Cplx> terms(coeffs.size());
    for (int idx = 0; idx < static_cast<int>(coeffs.size()); ++idx)
        terms[idx] = coeffs[idx] * unit_root((idx - static_cast<long long>(order)) * j, grid);
    return pairwise_sum(terms.data(), terms.size());
}

} // namespace

Cplx pairwise_sum(const Cplx* data, std::size_t n) {
    if (n <= 4) {
        Cplx acc(0, 0);
        for (std::size_t i = 0; i < n; ++i) acc += data[i];
        return acc;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

std::vector<Cplx> dft_forward_serial(const std::vector<Cplx>& samples, int order) {
    check_forward(samples, order);
    std::vector<Cplx> out(2 * order + 1);
    for (int idx = 0; idx < static_cast<int>(out.size()); ++idx)
        out[idx] = forward_entry(samples, idx - order);
    return out;
}

std::vector<Cplx> dft_forward_parallel(const std::vector<Cplx>& samples, int order) {
    check_forward(samples, order);
    std::vector<Cplx> out(2 * order + 1);
    const int count = static_cast<int>(out.size());
#pragma omp parallel for schedule(static)
    for (int idx = 0; idx < count; ++idx)
        out[idx] = forward_entry(samples, idx - order);
    return out;
}

std::vector<Cplx> dft_inverse_serial(const std::vector<Cplx>& coeffs, int grid) {
    const int order = check_inverse(coeffs, grid);
    std::vector<Cplx> out(grid);
    for (int j = 0; j < grid; ++j)
        out[j] = inverse_entry(coeffs, order, grid, j);
    return out;
}

std::vector<Cplx> dft_inverse_parallel(const std::vector<Cplx>& coeffs, int grid) {
    const int order = check_inverse(coeffs, grid);
    std::vector<Cplx> out(grid);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < grid; ++j)
        out[j] = inverse_entry(coeffs, order, grid, j);
    return out;
}

} // namespace fhkam::kernels
