#pragma once

#include "fhkam/reals.hpp"

#include <map>
#include <optional>
#include <vector>

namespace fhkam {

// Continued-fraction expansion of an irrational alpha in (0,1).
//
// Index conventions: quotients a_1..a_depth; convergents p_k/q_k for
// k = 0..depth with q_0 = 1, p_0 = 0, q_k = a_k q_{k-1} + q_{k-2}.
// errors[k] = beta_k = |q_k alpha - p_k|; the sequence is produced by the
// recurrence beta_{k+1} = beta_{k-1} - a_{k+1} beta_k (beta_{-1} = 1,
// beta_0 = alpha), never by forming q_k alpha directly, so each step costs a
// single fused multiply-subtract at working precision.
struct ContinuedFraction {
    Real alpha;
    Real floor_eps;                    // precision floor used during expansion
    std::vector<long long> quotients;  // a_1..a_depth
    std::vector<BigInt> numerators;    // p_0..p_depth
    std::vector<BigInt> denominators;  // q_0..q_depth
    std::vector<Real> errors;          // beta_0..beta_depth

    int depth() const { return static_cast<int>(quotients.size()); }
};

// Expand alpha to `depth` partial quotients.  `floor_eps` <= 0 selects the
// floor implied by the working precision.  Throws PrecisionExhausted (with the
// largest certified depth) if some beta_k sinks to the floor first.
ContinuedFraction cf_expand(const Real& alpha, int depth, const Real& floor_eps = Real(0));

// Reconstruct the value from quotients alone (used for round-trip checks and
// for building test rotations with prescribed quotients).
Real cf_value(const std::vector<long long>& quotients);

struct DivisorHit {
    Real gamma;    // max over the admissible modes of 1/||...||
    BigInt attain; // a mode attaining it
};

// Gamma_alpha(N) = max_{0<|n|<=N} 1/||n alpha||, located through the
// convergents: the max is 1/beta_k for the largest k with q_k <= N.
// Requires N >= 1 and N < q_depth (DepthInsufficient otherwise: without the
// next convergent the value cannot be certified).
DivisorHit worst_divisor(const ContinuedFraction& cf, const BigInt& N);

// Gamma_{alpha,beta}(N) = max_{0<=|n|<=N} 1/||n alpha - beta||.
// Exact, with the attaining n (ties resolved toward smaller |n|, then
// positive n).  Brute force below `brute_cutoff`; above it an exact
// branch-and-bound over the Ostrowski digit representation of n (the brute
// route is kept as the test oracle).  Throws RationalPair if the minimal
// distance falls below `res_floor`.
class PairDivisorTable {
public:
    PairDivisorTable(const ContinuedFraction& cf, Real beta, Real res_floor = Real(0));

    DivisorHit at(const BigInt& N) const;

    // minimal distance min_{0<=|n|<=N} ||n alpha - beta|| with attaining n
    struct MinHit {
        Real dist;
        BigInt attain;
    };
    MinHit min_distance(const BigInt& N) const;

    static constexpr long long brute_cutoff = 1 << 16;

private:
    mutable ContinuedFraction cf_; // owned; deepened on demand for large N
    Real beta_;
    Real res_floor_;

    // incremental brute-force cache: distances scanned up to cached_n_,
    // strict-improvement records support queries at every smaller N
    struct Record {
        long long n_abs;
        Real dist;
        BigInt attain;
    };
    mutable long long cached_n_ = 0;
    mutable Real best_dist_;
    mutable BigInt best_attain_;
    mutable Real pos_, neg_; // frac(+-n alpha - beta) at n = cached_n_
    mutable std::vector<Record> records_;
    mutable std::map<BigInt, MinHit> cache_;

    void extend_brute(long long N) const;
    MinHit search_large(const BigInt& N) const;
};

// Single-shot brute force over 0 <= |n| <= N (test oracle and small-N path).
PairDivisorTable::MinHit pair_min_brute(const Real& alpha, const Real& beta, long long N);

// Smallest |k| <= k_max with ||k alpha - beta|| < tol, if any; scan order
// 0, 1, -1, 2, -2, ...  (beta on the alpha-orbit detection).
std::optional<long long> is_rational_pair(const Real& alpha, const Real& beta,
                                          long long k_max, const Real& tol);

// Partial Brjuno-type sums:
//   dyadic:   sum_{j=0}^{n_max} log Gamma_alpha(2^j) / 2^j
//   quotient: sum over k >= 0 with q_k <= 2^{n_max} of log(q_{k+1}) / q_k
// Requires 2^{n_max} < q_depth.
struct BrjunoPartial {
    Real dyadic;
    Real quotient;
    int n_max;
};
BrjunoPartial brjuno_partial(const ContinuedFraction& cf, int n_max);

// Dyadic block bounds around sum_{i=2^n}^{2^{n+1}-1} log Gamma_alpha(i) / i^2:
//   lower  = (1/2) log Gamma_alpha(2^n) / 2^n
//   upper  = 2 log Gamma_alpha(2^{n+1}) / 2^{n+1}
// `upper_nolog` is the same expression without the log (reported alongside;
// it is not a valid upper bound in general and is not asserted).
struct SandwichReport {
    int n;
    Real lower;
    Real middle;
    Real upper;
    Real upper_nolog;
    bool holds; // lower <= middle <= upper
};
SandwichReport check_dyadic_sandwich(const ContinuedFraction& cf, int n);

} // namespace fhkam
