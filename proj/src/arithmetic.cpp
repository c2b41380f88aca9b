#include "fhkam/arithmetic.hpp"
#include "fhkam/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace fhkam {

namespace {

Real default_floor(int guard_bits) {
    return pow(Real(2), -static_cast<long>(precision_bits()) + guard_bits);
}

long long to_ll(const BigInt& v) {
    return v.convert_to<long long>();
}

} // namespace

ContinuedFraction cf_expand(const Real& alpha, int depth, const Real& floor_eps) {
    if (depth < 1)
        throw DomainViolation("arithmetic", "domain", "cf_expand: depth must be >= 1");
    if (!(alpha > 0 && alpha < 1))
        throw DomainViolation("arithmetic", "domain", "cf_expand: alpha must lie in (0,1)");
    Real fl = floor_eps;
    if (fl <= 0)
        fl = default_floor(8);
    if (alpha <= fl)
        throw PrecisionExhausted("arithmetic", "cf_expand: alpha is below the precision floor", 0);

    ContinuedFraction cf;
    cf.alpha = alpha;
    cf.floor_eps = fl;
    cf.numerators.push_back(0);
    cf.denominators.push_back(1);
    cf.errors.push_back(alpha);

    Real beta_prev = 1;    // beta_{-1}
    Real beta_cur = alpha; // beta_0
    BigInt p_prev = 1, p_cur = 0;
    BigInt q_prev = 0, q_cur = 1;

    for (int k = 1; k <= depth; ++k) {
        Real ratio = beta_prev / beta_cur;
        BigInt a_big(floor(ratio));
        if (a_big > std::numeric_limits<long long>::max() / 4)
            throw PrecisionExhausted("arithmetic",
                "cf_expand: quotient exceeds the representable range at depth " + std::to_string(k) +
                    " (input is rational at this precision)",
                k - 1);
        long long a = to_ll(a_big);
        Real beta_next = beta_prev - a * beta_cur;
        // floor misround by one shows up as beta_next outside [0, beta_cur)
        if (beta_next < 0) {
            a -= 1;
            beta_next += beta_cur;
        } else if (beta_next >= beta_cur) {
            a += 1;
            beta_next -= beta_cur;
        }
        if (a < 1 || beta_next <= fl)
            throw PrecisionExhausted("arithmetic",
                "cf_expand: error term reached the precision floor at depth " + std::to_string(k) +
                    "; safe depth is " + std::to_string(k - 1),
                k - 1);

        BigInt p_next = a * p_cur + p_prev;
        BigInt q_next = a * q_cur + q_prev;
        cf.quotients.push_back(a);
        cf.numerators.push_back(p_next);
        cf.denominators.push_back(q_next);
        cf.errors.push_back(beta_next);

        beta_prev = beta_cur;
        beta_cur = beta_next;
        p_prev = p_cur;
        p_cur = p_next;
        q_prev = q_cur;
        q_cur = q_next;
    }
    return cf;
}

Real cf_value(const std::vector<long long>& quotients) {
    if (quotients.empty())
        throw DomainViolation("arithmetic", "domain", "cf_value: empty quotient list");
    Real x = 0;
    for (auto it = quotients.rbegin(); it != quotients.rend(); ++it) {
        if (*it < 1)
            throw DomainViolation("arithmetic", "domain", "cf_value: quotients must be >= 1");
        x = Real(1) / (Real(*it) + x);
    }
    return x;
}

DivisorHit worst_divisor(const ContinuedFraction& cf, const BigInt& N) {
    if (N < 1)
        throw DomainViolation("arithmetic", "domain", "worst_divisor: N must be >= 1");
    const auto& q = cf.denominators;
    if (N >= q.back())
        throw DepthInsufficient("arithmetic",
            "worst_divisor: N >= q_depth = " + q.back().str() + "; deepen the expansion to certify");
    // largest k with q_k <= N
    auto it = std::upper_bound(q.begin(), q.end(), N);
    int k = static_cast<int>(it - q.begin()) - 1;
    return {Real(1) / cf.errors[k], q[k]};
}

PairDivisorTable::MinHit pair_min_brute(const Real& alpha, const Real& beta, long long N) {
    if (N < 0)
        throw DomainViolation("arithmetic", "domain", "pair_min_brute: N must be >= 0");
    Real fa = frac_part(alpha);
    Real start = frac_part(-beta);
    PairDivisorTable::MinHit best{dist_to_int(beta), 0};
    Real pos = start, neg = start;
    for (long long n = 1; n <= N; ++n) {
        pos += fa;
        if (pos >= 1) pos -= 1;
        neg -= fa;
        if (neg < 0) neg += 1;
        Real dp = pos < 1 - pos ? pos : 1 - pos;
        if (dp < best.dist) best = {dp, n};
        Real dn = neg < 1 - neg ? neg : 1 - neg;
        if (dn < best.dist) best = {dn, -n};
    }
    return best;
}

// ---------------------------------------------------------------------------
// PairDivisorTable
// ---------------------------------------------------------------------------

PairDivisorTable::PairDivisorTable(const ContinuedFraction& cf, Real beta, Real res_floor)
    : cf_(cf), beta_(std::move(beta)) {
    res_floor_ = res_floor > 0 ? std::move(res_floor) : default_floor(16);
    best_dist_ = dist_to_int(beta_);
    best_attain_ = 0;
    pos_ = frac_part(-beta_);
    neg_ = pos_;
    records_.push_back({0, best_dist_, 0});
}

void PairDivisorTable::extend_brute(long long N) const {
    Real fa = frac_part(cf_.alpha);
    for (long long n = cached_n_ + 1; n <= N; ++n) {
        pos_ += fa;
        if (pos_ >= 1) pos_ -= 1;
        neg_ -= fa;
        if (neg_ < 0) neg_ += 1;
        Real dp = pos_ < 1 - pos_ ? pos_ : 1 - pos_;
        if (dp < best_dist_) {
            best_dist_ = dp;
            best_attain_ = n;
            records_.push_back({n, dp, BigInt(n)});
        }
        Real dn = neg_ < 1 - neg_ ? neg_ : 1 - neg_;
        if (dn < best_dist_) {
            best_dist_ = dn;
            best_attain_ = -n;
            records_.push_back({n, dn, BigInt(-n)});
        }
    }
    if (N > cached_n_) cached_n_ = N;
}

namespace {

struct Interval {
    Real lo, hi;
};

Interval hull(const Interval& x, const Interval& y) {
    return {x.lo < y.lo ? x.lo : y.lo, x.hi > y.hi ? x.hi : y.hi};
}

Interval offset_family(const Real& d, long long c_lo, long long c_hi, const Interval& sub) {
    // ranges of c*d + sub over integer c in [c_lo, c_hi]; linear in c
    Real v1 = c_lo * d, v2 = c_hi * d;
    Real lo = v1 < v2 ? v1 : v2;
    Real hi = v1 < v2 ? v2 : v1;
    return {lo + sub.lo, hi + sub.hi};
}

// lower bound of dist-to-integer over the interval [a, b]
Real interval_int_dist(const Real& a, const Real& b) {
    if (floor(b) >= ceil(a)) return Real(0); // an integer lies inside
    Real da = dist_to_int(a), db = dist_to_int(b);
    return da < db ? da : db;
}

// Exact minimizer of ||n*alpha - y|| over 1 <= n <= N via branch-and-bound on
// the Ostrowski digit representation n = sum c_{k+1} q_k.  Digits are chosen
// fine-to-coarse (level k multiplies q_k); the unchosen coarse tail k..K has a
// provably tight value range computed by the A/Z interval recursion below, so
// subtrees that cannot approach the incumbent are cut.
struct OneSidedSearch {
    const ContinuedFraction& cf;
    Real y;
    BigInt N;
    int K = 0;                  // top level: q_K <= N < q_{K+1}
    std::vector<Real> D;        // signed errors q_k alpha - p_k = (-1)^k beta_k
    std::vector<Interval> Z;    // value range of levels k..K, first digit free
    std::vector<Interval> A;    // same, first digit capped at a_{k+1} - 1
    Real best;
    BigInt best_n;
    long long nodes = 0;
    static constexpr long long node_budget = 20'000'000;

    long long a_of(int k) const { return cf.quotients[k]; } // a_{k+1}

    void prepare() {
        const auto& q = cf.denominators;
        auto it = std::upper_bound(q.begin(), q.end(), N);
        K = static_cast<int>(it - q.begin()) - 1;
        D.resize(K + 1);
        for (int k = 0; k <= K; ++k)
            D[k] = (k % 2 == 0) ? cf.errors[k] : -cf.errors[k];
        Z.assign(K + 2, {Real(0), Real(0)});
        A.assign(K + 2, {Real(0), Real(0)});
        for (int k = K; k >= 1; --k) {
            long long a = a_of(k);
            const Interval& sub_any = (k + 1 <= K) ? Z[k + 1] : Z[K + 1];
            const Interval& sub_cap = (k + 1 <= K) ? A[k + 1] : A[K + 1];
            // first digit c in [1, a] -> deeper first digit capped; c = a only
            // reachable when the finer digit was zero, which the caller tracks;
            // for range purposes the union below is exact for the Z family and
            // a superset never matters because A/Z are used as certified hulls.
            Interval z = hull(sub_any, offset_family(D[k], 1, a, sub_cap));
            Interval aa = (a >= 2) ? hull(sub_any, offset_family(D[k], 1, a - 1, sub_cap))
                                   : sub_any;
            Z[k] = z;
            A[k] = aa;
        }
    }

    void seed_brute(long long limit) {
        Real fa = frac_part(cf.alpha);
        Real x = frac_part(-y);
        best = Real(2);
        best_n = 0;
        long long lim = limit;
        if (N < lim) lim = to_ll(N);
        for (long long n = 1; n <= lim; ++n) {
            x += fa;
            if (x >= 1) x -= 1;
            Real d = x < 1 - x ? x : 1 - x;
            if (d < best) {
                best = d;
                best_n = n;
            }
        }
    }

    void leaf(const BigInt& n_hat, const Real& v_hat) {
        if (n_hat < 1) return;
        Real d = dist_to_int(v_hat - y);
        if (d < best || (d == best && abs(n_hat) < abs(best_n))) {
            best = d;
            best_n = n_hat;
        }
    }

    void node(int k, bool prev_zero, const BigInt& n_hat, const Real& v_hat) {
        if (++nodes > node_budget)
            throw ConvergenceError("arithmetic", "pair divisor search exceeded its node budget");
        if (k > K) {
            leaf(n_hat, v_hat);
            return;
        }
        long long cap = (k == 0) ? a_of(0) - 1 : (prev_zero ? a_of(k) : a_of(k) - 1);
        BigInt room = (N - n_hat) / cf.denominators[k];
        long long cmax = cap;
        if (room < cmax) cmax = to_ll(room);
        if (cmax < 0) return;

        const Interval& H = Z[k + 1]; // hull over both follow-up families
        // integer offsets m reachable by v_hat + c*D + rest - y within +-best
        Interval span = offset_family(D[k], 0, cmax, H);
        Real slo = v_hat - y + span.lo - best;
        Real shi = v_hat - y + span.hi + best;

        // candidate digits, cheapest-first
        std::vector<std::pair<double, long long>> cands;
        for (BigInt m = BigInt(ceil(slo)); m <= BigInt(floor(shi)); ++m) {
            Real wlo = Real(m) + y - v_hat - H.hi - best;
            Real whi = Real(m) + y - v_hat - H.lo + best;
            Real clo_r, chi_r;
            if (D[k] > 0) {
                clo_r = wlo / D[k];
                chi_r = whi / D[k];
            } else {
                clo_r = whi / D[k];
                chi_r = wlo / D[k];
            }
            long long clo = 0, chi = cmax;
            if (clo_r > 0) {
                if (clo_r > cmax + 1) continue;
                clo = to_ll(BigInt(ceil(clo_r))) - 1;
                if (clo < 0) clo = 0;
            }
            if (chi_r < cmax) {
                if (chi_r < -1) continue;
                chi = to_ll(BigInt(floor(chi_r))) + 1;
                if (chi > cmax) chi = cmax;
            }
            for (long long c = clo; c <= chi; ++c) {
                const Interval& R = (c == 0) ? Z[k + 1] : A[k + 1];
                Real base = v_hat + c * D[k] - y;
                Real dmin = interval_int_dist(base + R.lo, base + R.hi);
                if (dmin < best)
                    cands.emplace_back(to_double(dmin), c);
            }
        }
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end(),
                                [](const auto& x, const auto& yv) { return x.second == yv.second; }),
                    cands.end());
        for (const auto& [dm, c] : cands) {
            // revalidate against the (possibly improved) incumbent
            const Interval& R = (c == 0) ? Z[k + 1] : A[k + 1];
            Real base = v_hat + c * D[k] - y;
            if (interval_int_dist(base + R.lo, base + R.hi) >= best)
                continue;
            node(k + 1, c == 0, n_hat + c * cf.denominators[k], v_hat + c * D[k]);
        }
    }

    void run() {
        prepare();
        seed_brute(8192);
        node(0, true, BigInt(0), Real(0));
    }
};

} // namespace

PairDivisorTable::MinHit PairDivisorTable::search_large(const BigInt& N) const {
    while (cf_.denominators.back() <= N)
        cf_ = cf_expand(cf_.alpha, cf_.depth() + 16, cf_.floor_eps);

    MinHit best{dist_to_int(beta_), 0};

    OneSidedSearch pos{cf_, beta_, N};
    pos.run();
    if (pos.best < best.dist || (pos.best == best.dist && abs(pos.best_n) < abs(best.attain)))
        best = {pos.best, pos.best_n};

    OneSidedSearch neg{cf_, -beta_, N};
    neg.run();
    BigInt neg_attain = -neg.best_n;
    if (neg.best < best.dist ||
        (neg.best == best.dist && abs(neg_attain) < abs(best.attain)))
        best = {neg.best, neg_attain};

    return best;
}

PairDivisorTable::MinHit PairDivisorTable::min_distance(const BigInt& N) const {
    if (N < 0)
        throw DomainViolation("arithmetic", "domain", "pair divisor: N must be >= 0");
    auto cached = cache_.find(N);
    if (cached != cache_.end()) return cached->second;

    MinHit hit;
    if (N <= brute_cutoff) {
        extend_brute(to_ll(N));
        // last record with |n| <= N
        const Record* found = &records_.front();
        for (const auto& r : records_) {
            if (r.n_abs > N) break;
            found = &r;
        }
        hit = {found->dist, found->attain};
    } else {
        hit = search_large(N);
    }
    cache_.emplace(N, hit);
    return hit;
}

DivisorHit PairDivisorTable::at(const BigInt& N) const {
    MinHit h = min_distance(N);
    if (h.dist < res_floor_) {
        long long k = (abs(h.attain) < BigInt(std::numeric_limits<long long>::max()))
                          ? to_ll(h.attain)
                          : -1;
        throw RationalPair("arithmetic",
            "pair divisor: ||n alpha - beta|| = " + h.dist.str(8) + " at n = " + h.attain.str() +
                " is below the resonance floor",
            k);
    }
    return {Real(1) / h.dist, h.attain};
}

std::optional<long long> is_rational_pair(const Real& alpha, const Real& beta,
                                          long long k_max, const Real& tol) {
    if (dist_to_int(beta) < tol) return 0;
    Real fa = frac_part(alpha);
    Real start = frac_part(-beta);
    Real pos = start, neg = start;
    for (long long k = 1; k <= k_max; ++k) {
        pos += fa;
        if (pos >= 1) pos -= 1;
        neg -= fa;
        if (neg < 0) neg += 1;
        if ((pos < 1 - pos ? pos : 1 - pos) < tol) return k;
        if ((neg < 1 - neg ? neg : 1 - neg) < tol) return -k;
    }
    return std::nullopt;
}

BrjunoPartial brjuno_partial(const ContinuedFraction& cf, int n_max) {
    if (n_max < 0)
        throw DomainViolation("arithmetic", "domain", "brjuno_partial: n_max must be >= 0");
    BigInt top = BigInt(1) << n_max;
    if (top >= cf.denominators.back())
        throw DepthInsufficient("arithmetic",
            "brjuno_partial: 2^n_max >= q_depth; deepen the expansion");

    BrjunoPartial out;
    out.n_max = n_max;
    out.dyadic = 0;
    Real two_pow = 1;
    for (int j = 0; j <= n_max; ++j) {
        DivisorHit h = worst_divisor(cf, BigInt(1) << j);
        out.dyadic += log(h.gamma) / two_pow;
        two_pow *= 2;
    }
    out.quotient = 0;
    for (int k = 0; k + 1 <= cf.depth(); ++k) {
        if (cf.denominators[k] > top) break;
        out.quotient += log(Real(cf.denominators[k + 1])) / Real(cf.denominators[k]);
    }
    return out;
}

SandwichReport check_dyadic_sandwich(const ContinuedFraction& cf, int n) {
    if (n < 0)
        throw DomainViolation("arithmetic", "domain", "check_dyadic_sandwich: n must be >= 0");
    BigInt lo = BigInt(1) << n;
    BigInt hi = BigInt(1) << (n + 1);
    if (hi >= cf.denominators.back())
        throw DepthInsufficient("arithmetic",
            "check_dyadic_sandwich: 2^{n+1} >= q_depth; deepen the expansion");
    if (hi > BigInt(1) << 26)
        throw DomainViolation("arithmetic", "domain",
            "check_dyadic_sandwich: block too large to sum directly (n > 25)");

    SandwichReport rep;
    rep.n = n;
    DivisorHit g_lo = worst_divisor(cf, lo);
    DivisorHit g_hi = worst_divisor(cf, hi);
    rep.lower = log(g_lo.gamma) / (2 * Real(lo));
    rep.upper = 2 * log(g_hi.gamma) / Real(hi);
    rep.upper_nolog = 2 * g_hi.gamma / Real(hi);

    // walk the convergents across the block; Gamma is constant between
    // consecutive denominators
    const auto& q = cf.denominators;
    auto it = std::upper_bound(q.begin(), q.end(), lo);
    int k = static_cast<int>(it - q.begin()) - 1;
    rep.middle = 0;
    for (BigInt i = lo; i < hi; ++i) {
        while (k + 1 < static_cast<int>(q.size()) && q[k + 1] <= i) ++k;
        rep.middle += -log(cf.errors[k]) / (Real(i) * Real(i));
    }
    rep.holds = (rep.lower <= rep.middle) && (rep.middle <= rep.upper);
    return rep;
}

} // namespace fhkam
