// Timing and bitwise-agreement harness for the serial reference transforms
// and their OpenMP variants.  The parallel kernels must reproduce the serial
// outputs bit for bit at any thread count; a mismatch is a build defect.

#include "fhkam/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <random>
#include <vector>

namespace {

using fhkam::kernels::Cplx;

std::vector<Cplx> random_samples(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    std::vector<Cplx> v(n);
    for (Cplx& z : v) z = Cplx(2 * uniform() - 1, 2 * uniform() - 1);
    return v;
}

template <class F> double time_ms(F&& f, int reps) {
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

bool bitwise_equal(const std::vector<Cplx>& a, const std::vector<Cplx>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].real() != b[i].real() || a[i].imag() != b[i].imag()) return false;
    return true;
}

} // namespace

int main() {
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("transform benchmark, %d thread(s)\n", threads);
    std::printf("%8s %8s %12s %14s %9s %8s\n", "grid", "order", "serial (ms)", "parallel (ms)",
                "speedup", "bitwise");

    struct Case {
        int grid;
        int order;
        int reps;
    };
    const Case cases[] = {{512, 128, 40}, {2048, 512, 10}, {4100, 1024, 4}, {8192, 2048, 2}};

    bool all_equal = true;
    for (const Case& c : cases) {
        std::vector<Cplx> samples = random_samples(static_cast<std::size_t>(c.grid), 42);
        std::vector<Cplx> fs, fp;
        double ts = time_ms([&] { fs = fhkam::kernels::dft_forward_serial(samples, c.order); },
                            c.reps);
        double tp = time_ms([&] { fp = fhkam::kernels::dft_forward_parallel(samples, c.order); },
                            c.reps);
        bool eq = bitwise_equal(fs, fp);

        std::vector<Cplx> is, ip;
        double tis = time_ms([&] { is = fhkam::kernels::dft_inverse_serial(fs, c.grid); },
                             c.reps);
        double tip = time_ms([&] { ip = fhkam::kernels::dft_inverse_parallel(fs, c.grid); },
                             c.reps);
        bool ieq = bitwise_equal(is, ip);

        all_equal = all_equal && eq && ieq;
        std::printf("%8d %8d %12.3f %14.3f %8.2fx %8s  (forward)\n", c.grid, c.order, ts, tp,
                    tp > 0 ? ts / tp : 0.0, eq ? "yes" : "NO");
        std::printf("%8d %8d %12.3f %14.3f %8.2fx %8s  (inverse)\n", c.grid, c.order, tis, tip,
                    tip > 0 ? tis / tip : 0.0, ieq ? "yes" : "NO");
    }
    if (!all_equal) {
        std::printf("FAIL: parallel kernels diverged from the serial reference\n");
        return 1;
    }
    std::printf("all parallel outputs match the serial reference bit for bit\n");
    return 0;
}
