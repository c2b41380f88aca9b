#pragma once

// Shared independent oracles for the test suites: brute-force searches and
// closed forms that double-check the library's faster or structured routes.

#include "fhkam/arithmetic.hpp"
#include "fhkam/reals.hpp"

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using fhkam::BigInt;
using fhkam::Real;

inline Real golden() { return (sqrt(Real(5)) - 1) / 2; }
inline Real sqrt2m1() { return sqrt(Real(2)) - 1; }

// max over 0 < |n| <= N of 1/||n alpha||, scanning every n
struct BruteHit {
    Real gamma;
    long long attain;
};

inline BruteHit gamma_single_brute(const Real& alpha, long long N) {
    Real fa = fhkam::frac_part(alpha);
    Real x = 0;
    Real best = 1;
    long long attain = 0;
    for (long long n = 1; n <= N; ++n) {
        x += fa;
        if (x >= 1) x -= 1;
        Real d = x < 1 - x ? x : 1 - x;
        if (d < best) {
            best = d;
            attain = n;
        }
    }
    return {Real(1) / best, attain};
}

// platform-independent deterministic uniforms
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double sym(double scale) { return scale * (2 * uniform() - 1); }
    std::complex<double> csym(double scale) { return {sym(scale), sym(scale)}; }
    long long integer(long long lo, long long hi) {
        return lo + static_cast<long long>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

} // namespace oracle
