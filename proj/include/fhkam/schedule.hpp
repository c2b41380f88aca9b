#pragma once

#include "fhkam/arithmetic.hpp"
#include "fhkam/reals.hpp"

#include <string>
#include <vector>

namespace fhkam {

// Convergence-control sequences for the staged construction.  l_n and w_n are
// kept as natural logs throughout: l_n shrinks like e^{-n^2} and underflows
// double precision near n = 27, while the tables must extend past n = 60.
//
//   log l_n = -n^2 - log(16 aleph) - log A_n - log B_n - n log 2
//   log w_n = log l_n - log aleph - n log 4 - log A_n
//
// with A_n the worst pair divisor at 2^n and B_n the worst single divisor.
// d1_n is the unique positive root of
//   log aleph + log l_n - 2 pi 2^n d - log d = log l_{n+1}
// and d0_n the root of the same equation with w_n on the left and w_{n+1}/4
// on the right.  Both sequences have length n_max (entry n couples rows n and
// n+1).
struct KamSchedule {
    Real aleph;
    int n_max = 0;
    std::vector<Real> logA;  // n = 0..n_max
    std::vector<Real> logB;
    std::vector<Real> log_l;
    std::vector<Real> log_w;
    std::vector<Real> d0;    // n = 0..n_max-1
    std::vector<Real> d1;

    // set by choose_n_star: delta_n[n] is the strip half-width entering stage
    // n, tabulated for n in [n_star, n_max] (zero below n_star)
    int n_star = -1;
    Real delta;
    std::vector<Real> delta_n;
};

// Build the full table.  Deepens its own copy of the expansion as the dyadic
// range grows; throws DepthInsufficient if alpha's precision runs out first,
// RationalPair if beta resonates with alpha below the precision floor.
KamSchedule build_schedule(const ContinuedFraction& alpha_cf, const Real& beta,
                           const Real& aleph, int n_max);

// Unique d > 0 with -2 pi 2^n d - log d = log_ratio, bracketed then bisected
// to 1e-14 relative.  The objective is strictly decreasing, so the root is
// unique and the solver cannot fail on finite input.
Real solve_width_loss(const Real& log_ratio, int n);

// Smallest n with sum_{m >= n} max(d0_m, d1_m) <= delta / 4 (suffix over the
// tabulated range).  Sets schedule.n_star, schedule.delta and the strip
// recursion delta^{n_star} = 3 delta / 4, delta^{n+1} = delta^n - max(d0_n,
// d1_n).  Throws DomainViolation("n-max-too-small") if even the final suffix
// exceeds delta / 4.
int choose_n_star(KamSchedule& schedule, const Real& delta);

// The four largeness inequalities the staged construction relies on, each
// evaluated over the whole table with its measured margin, plus the measured
// width-loss sums (report-only: failures are recorded, never thrown).
struct LemmaReport {
    struct Item {
        std::string name;
        Real value;  // measured sum or max
        Real bound;
        bool pass;
    };
    std::vector<Item> items;
    Real sum_d0;
    Real sum_d1;
    bool all_pass;
};
LemmaReport verify_lemma_properties(const KamSchedule& schedule);

} // namespace fhkam
