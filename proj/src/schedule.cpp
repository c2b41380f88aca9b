#include "fhkam/schedule.hpp"

#include "fhkam/errors.hpp"

#include <algorithm>

namespace fhkam {

namespace {

// objective of the width-loss equation; strictly decreasing in d
Real width_objective(const Real& d, const Real& two_pi_scale) {
    return -two_pi_scale * d - log(d);
}

} // namespace

Real solve_width_loss(const Real& log_ratio, int n) {
    if (n < 0)
        throw DomainViolation("schedule", "domain", "solve_width_loss: n must be >= 0");
    Real two_pi_scale = 2 * pi_hp() * pow(Real(2), n);

    Real lo = 1, hi = 1;
    Real f1 = width_objective(Real(1), two_pi_scale);
    if (f1 > log_ratio) {
        // root lies to the right: grow hi until the objective drops below
        do {
            lo = hi;
            hi *= 2;
        } while (width_objective(hi, two_pi_scale) > log_ratio);
    } else if (f1 < log_ratio) {
        do {
            hi = lo;
            lo /= 2;
        } while (width_objective(lo, two_pi_scale) < log_ratio);
    } else {
        return Real(1);
    }

    for (int it = 0; it < 160; ++it) {
        Real mid = (lo + hi) / 2;
        if (width_objective(mid, two_pi_scale) > log_ratio)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= Real("1e-16") * lo) break;
    }
    return (lo + hi) / 2;
}

KamSchedule build_schedule(const ContinuedFraction& alpha_cf, const Real& beta,
                           const Real& aleph, int n_max) {
    if (aleph <= 2)
        throw ConfigError("schedule", "build_schedule: aleph must exceed 2");
    if (n_max < 1)
        throw ConfigError("schedule", "build_schedule: n_max must be >= 1");

    Real res_floor = pow(Real(2), -static_cast<int>(precision_bits()) + 8);
    PairDivisorTable pair(alpha_cf, beta, res_floor);

    // single-divisor table needs q_depth > 2^n_max; deepen our own copy
    ContinuedFraction cf = alpha_cf;
    auto gamma_single = [&cf](const BigInt& N) -> Real {
        for (;;) {
            try {
                return worst_divisor(cf, N).gamma;
            } catch (const DepthInsufficient&) {
                try {
                    cf = cf_expand(cf.alpha, cf.depth() + 16, cf.floor_eps);
                } catch (const PrecisionExhausted& e) {
                    throw DepthInsufficient("schedule",
                        std::string("build_schedule: expansion exhausted at depth ") +
                            std::to_string(e.safe_depth()) +
                            " before covering the requested dyadic range");
                }
            }
        }
    };

    KamSchedule s;
    s.aleph = aleph;
    s.n_max = n_max;
    Real log_aleph = log(aleph);
    Real log2 = log(Real(2));

    for (int n = 0; n <= n_max; ++n) {
        BigInt N = BigInt(1) << n;
        s.logA.push_back(log(pair.at(N).gamma));
        s.logB.push_back(log(gamma_single(N)));
        Real ll = -Real(n) * n - log(16 * aleph) - s.logA[n] - s.logB[n] - n * log2;
        s.log_l.push_back(ll);
        s.log_w.push_back(ll - log_aleph - n * (2 * log2) - s.logA[n]);
    }
    for (int n = 0; n < n_max; ++n) {
        s.d1.push_back(solve_width_loss(s.log_l[n + 1] - s.log_l[n] - log_aleph, n));
        s.d0.push_back(solve_width_loss(s.log_w[n + 1] - log(Real(4)) - s.log_w[n] - log_aleph, n));
    }
    return s;
}

int choose_n_star(KamSchedule& schedule, const Real& delta) {
    const int n_max = schedule.n_max;
    std::vector<Real> suffix(n_max + 1, Real(0));
    for (int n = n_max - 1; n >= 0; --n) {
        Real d = std::max(schedule.d0[n], schedule.d1[n]);
        suffix[n] = suffix[n + 1] + d;
    }

    Real budget = delta / 4;
    int n_star = -1;
    for (int n = 0; n <= n_max - 1; ++n) {
        if (suffix[n] <= budget) {
            n_star = n;
            break;
        }
    }
    if (n_star < 0)
        throw DomainViolation("schedule", "n-max-too-small",
            "choose_n_star: even the final tabulated width losses exceed delta/4; "
            "raise n_max or delta");

    schedule.n_star = n_star;
    schedule.delta = delta;
    schedule.delta_n.assign(n_max + 1, Real(0));
    schedule.delta_n[n_star] = 3 * delta / 4;
    for (int n = n_star; n < n_max; ++n)
        schedule.delta_n[n + 1] =
            schedule.delta_n[n] - std::max(schedule.d0[n], schedule.d1[n]);
    return n_star;
}

LemmaReport verify_lemma_properties(const KamSchedule& s) {
    LemmaReport r;
    Real log_aleph = log(s.aleph);
    Real log2 = log(Real(2));

    // sum_n aleph 2^n B_n l_n < 1/8
    Real sum1 = 0;
    // per-n max of aleph 2^n A_n l_n < 1/16
    Real max2 = 0;
    // per-n max of aleph w_n (2^n A_n)^2 < 1/32
    Real max3 = 0;
    // sum_n aleph w_n 2^n A_n < 1/16
    Real sum4 = 0;
    for (int n = 0; n <= s.n_max; ++n) {
        Real nlog2 = n * log2;
        sum1 += exp(log_aleph + nlog2 + s.logB[n] + s.log_l[n]);
        max2 = std::max(max2, Real(exp(log_aleph + nlog2 + s.logA[n] + s.log_l[n])));
        max3 = std::max(max3, Real(exp(log_aleph + s.log_w[n] + 2 * (nlog2 + s.logA[n]))));
        sum4 += exp(log_aleph + s.log_w[n] + nlog2 + s.logA[n]);
    }
    r.items.push_back({"sum aleph 2^n B_n l_n", sum1, Real(1) / 8, sum1 < Real(1) / 8});
    r.items.push_back({"max aleph 2^n A_n l_n", max2, Real(1) / 16, max2 < Real(1) / 16});
    r.items.push_back({"max aleph w_n (2^n A_n)^2", max3, Real(1) / 32, max3 < Real(1) / 32});
    r.items.push_back({"sum aleph w_n 2^n A_n", sum4, Real(1) / 16, sum4 < Real(1) / 16});

    r.sum_d0 = 0;
    r.sum_d1 = 0;
    for (const Real& d : s.d0) r.sum_d0 += d;
    for (const Real& d : s.d1) r.sum_d1 += d;
    r.all_pass = true;
    for (const auto& item : r.items) r.all_pass = r.all_pass && item.pass;
    return r;
}

} // namespace fhkam
