#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fhkam/arithmetic.hpp"
#include "fhkam/errors.hpp"
#include "oracle_helpers.hpp"

#include <vector>

using namespace fhkam;

namespace {

bool close(const Real& a, const Real& b, const Real& tol) { return abs(a - b) <= tol; }

Real tiny() { return Real("1e-60"); }

} // namespace

TEST_CASE("golden mean expansion: quotients, convergents, errors") {
    Real a = oracle::golden();
    ContinuedFraction cf = cf_expand(a, 8);

    REQUIRE(cf.depth() == 8);
    for (long long q : cf.quotients) CHECK(q == 1);

    std::vector<long long> fib = {1, 1, 2, 3, 5, 8, 13, 21, 34};
    REQUIRE(cf.denominators.size() == 9);
    for (int k = 0; k <= 8; ++k) CHECK(cf.denominators[k] == fib[k]);
    // p_k is the previous Fibonacci number
    for (int k = 1; k <= 8; ++k) CHECK(cf.numerators[k] == fib[k - 1]);
    CHECK(cf.numerators[0] == 0);

    // independent oracle: beta_k recomputed as |q_k alpha - p_k| at full precision
    for (int k = 0; k <= 8; ++k) {
        Real direct = abs(Real(cf.denominators[k]) * a - Real(cf.numerators[k]));
        CHECK(close(cf.errors[k], direct, tiny()));
    }
    // closed form for the golden mean: beta_k = alpha^{k+1}
    for (int k = 0; k <= 8; ++k) CHECK(close(cf.errors[k], pow(a, k + 1), tiny()));
    // strict decrease
    for (int k = 1; k <= 8; ++k) CHECK(cf.errors[k] < cf.errors[k - 1]);
}

TEST_CASE("reciprocal pi expansion") {
    Real a = 1 / pi_hp();
    ContinuedFraction cf = cf_expand(a, 5);
    CHECK(cf.quotients[0] == 3);
    CHECK(cf.quotients[1] == 7);
    CHECK(cf.quotients[2] == 15);
    CHECK(cf.quotients[3] == 1);
    CHECK(cf.quotients[4] == 292);
}

TEST_CASE("round trip value -> expansion -> quotients") {
    oracle::Rng rng(20240601);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<long long> qs;
        for (int i = 0; i < 20; ++i) qs.push_back(rng.integer(1, 9));
        qs.back() = rng.integer(2, 9); // canonical form: final quotient >= 2
        Real v = cf_value(qs);
        ContinuedFraction cf = cf_expand(v, 20);
        REQUIRE(cf.depth() == 20);
        // the final quotient of an exactly rational input sits on an integer
        // boundary of the floor and is legitimately precision-sensitive; every
        // earlier quotient must reproduce exactly
        for (int i = 0; i < 19; ++i) CHECK(cf.quotients[i] == qs[i]);
    }
    // reconstruction agrees with the original value
    ContinuedFraction g = cf_expand(oracle::golden(), 80);
    CHECK(close(cf_value(g.quotients), oracle::golden(), Real("1e-30")));
}

TEST_CASE("precision floor: truncated decimal input is rejected at depth") {
    ParsedReal pr = parse_decimal("0.61803399");
    CHECK(close(pr.resolution, Real("1e-8"), Real("1e-20")));

    int safe = -1;
    try {
        cf_expand(pr.value, 40, pr.resolution);
        FAIL("expected PrecisionExhausted");
    } catch (const PrecisionExhausted& e) {
        safe = e.safe_depth();
        CHECK(std::string(e.code()) == "precision-exhausted");
    }
    CHECK(safe >= 20);
    CHECK(safe < 40);

    ContinuedFraction cf = cf_expand(pr.value, safe, pr.resolution);
    REQUIRE(cf.depth() == safe);
    for (int i = 0; i < 10; ++i) CHECK(cf.quotients[i] == 1);
}

TEST_CASE("real helpers") {
    Real a = oracle::golden();
    CHECK(close(dist_to_int(a + 2), 1 - a, tiny()));
    CHECK(close(frac_part(Real("-0.25")), Real("0.75"), tiny()));
    CHECK(round_to_int(Real("2.6")) == 3);
    CHECK(round_to_int(Real("-2.6")) == -3);
    CHECK(close(dist_to_int(Real(7)), Real(0), tiny()));
}

TEST_CASE("worst divisor equals brute scan (golden)") {
    Real a = oracle::golden();
    ContinuedFraction cf = cf_expand(a, 40);
    for (long long N = 1; N <= 400; ++N) {
        DivisorHit hit = worst_divisor(cf, N);
        oracle::BruteHit brute = oracle::gamma_single_brute(a, N);
        CHECK(close(hit.gamma, brute.gamma, Real("1e-45")));
        CHECK(hit.attain == brute.attain);
        // certificate: the reported mode attains the reported value
        CHECK(close(Real(1) / dist_to_int(Real(hit.attain) * a), hit.gamma, Real("1e-45")));
    }
    DivisorHit big = worst_divisor(cf, 10000);
    oracle::BruteHit bigb = oracle::gamma_single_brute(a, 10000);
    CHECK(close(big.gamma, bigb.gamma, Real("1e-40")));
    CHECK(big.attain == 6765);
}

TEST_CASE("worst divisor equals brute scan (sqrt2-1 and random)") {
    {
        Real a = oracle::sqrt2m1();
        ContinuedFraction cf = cf_expand(a, 30);
        for (long long N = 1; N <= 300; ++N) {
            DivisorHit hit = worst_divisor(cf, N);
            oracle::BruteHit brute = oracle::gamma_single_brute(a, N);
            CHECK(close(hit.gamma, brute.gamma, Real("1e-45")));
            CHECK(hit.attain == brute.attain);
        }
    }
    for (int k : {2, 3, 5, 6, 7, 10}) {
        Real a = frac_part(sqrt(Real(k)));
        ContinuedFraction cf = cf_expand(a, 25);
        for (long long N : {1, 2, 3, 5, 17, 50, 150}) {
            DivisorHit hit = worst_divisor(cf, N);
            oracle::BruteHit brute = oracle::gamma_single_brute(a, N);
            CHECK(close(hit.gamma, brute.gamma, Real("1e-40")));
            CHECK(hit.attain == brute.attain);
        }
    }
}

TEST_CASE("worst divisor needs the next convergent to certify") {
    ContinuedFraction cf = cf_expand(oracle::golden(), 10); // q_10 = 89
    CHECK_THROWS_AS((void)worst_divisor(cf, 89), DepthInsufficient);
    DivisorHit hit = worst_divisor(cf, 88);
    CHECK(hit.attain == 55);
    CHECK(close(hit.gamma, Real(1) / cf.errors[9], tiny()));
    CHECK_THROWS_AS((void)worst_divisor(cf, 0), DomainViolation);
}

TEST_CASE("worst divisor is monotone and at least 2") {
    ContinuedFraction cf = cf_expand(oracle::golden(), 40);
    Real prev = 0;
    for (long long N = 1; N <= 500; ++N) {
        Real g = worst_divisor(cf, N).gamma;
        CHECK(g >= prev);
        prev = g;
    }
    CHECK(worst_divisor(cf, 1).gamma >= 2);
}

TEST_CASE("pair divisor: exact search equals brute force (golden, beta = alpha/2)") {
    Real a = oracle::golden();
    Real b = a / 2;
    PairDivisorTable table(cf_expand(a, 60), b);

    for (long long N = 0; N <= 300; ++N) {
        auto fast = table.min_distance(N);
        auto brute = pair_min_brute(a, b, N);
        CHECK(close(fast.dist, brute.dist, tiny()));
        CHECK(fast.attain == brute.attain);
    }
    for (long long N : {1000LL, 10000LL, 65536LL, 65537LL, 131072LL, 262144LL, 1048576LL}) {
        auto fast = table.min_distance(N);
        auto brute = pair_min_brute(a, b, N);
        CHECK(close(fast.dist, brute.dist, Real("1e-50")));
        CHECK(fast.attain == brute.attain);
    }
}

TEST_CASE("pair divisor: exact search equals brute force (random pairs)") {
    oracle::Rng rng(424242);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<long long> qs;
        for (int i = 0; i < 30; ++i) qs.push_back(rng.integer(1, 6));
        qs.back() = 2;
        Real a = cf_value(qs);
        Real b = Real(rng.uniform());
        PairDivisorTable table(cf_expand(a, 30), b);
        for (long long N : {0LL, 1LL, 7LL, 64LL, 300LL, 70000LL, 131072LL}) {
            auto fast = table.min_distance(N);
            auto brute = pair_min_brute(a, b, N);
            CHECK(close(fast.dist, brute.dist, Real("1e-50")));
            CHECK(fast.attain == brute.attain);
        }
    }
}

TEST_CASE("pair divisor: n = 0 participates") {
    Real a = oracle::golden();
    PairDivisorTable table(cf_expand(a, 20), Real("1e-6"));
    auto hit = table.at(5);
    CHECK(hit.attain == 0);
    CHECK(close(hit.gamma, Real("1e6"), Real("1e-4")));
}

TEST_CASE("pair divisor: large-N queries are certified and monotone") {
    Real a = oracle::golden();
    Real b = a / 2;
    PairDivisorTable table(cf_expand(a, 60), b);

    Real prev = 1;
    for (int e : {17, 20, 25, 30, 40}) {
        auto hit = table.min_distance(BigInt(1) << e);
        CHECK(hit.dist <= prev);
        CHECK(abs(hit.attain) <= BigInt(1) << e);
        // achievability certificate, independent of the search
        CHECK(close(hit.dist, dist_to_int(Real(hit.attain) * a - b), Real("1e-50")));
        prev = hit.dist;
    }
    // repeated queries are consistent (memoization)
    auto h1 = table.min_distance(BigInt(1) << 20);
    auto h2 = table.min_distance(BigInt(1) << 20);
    CHECK(h1.dist == h2.dist);
    CHECK(h1.attain == h2.attain);
}

TEST_CASE("pair divisor: resonance floor raises a typed error") {
    Real a = oracle::golden();
    Real b = frac_part(3 * a);
    PairDivisorTable table(cf_expand(a, 20), b, Real("1e-20"));
    auto below = pair_min_brute(a, b, 2);
    CHECK(close(table.at(2).gamma, Real(1) / below.dist, tiny()));
    try {
        (void)table.at(3);
        FAIL("expected RationalPair");
    } catch (const RationalPair& e) {
        CHECK(e.k() == 3);
        CHECK(std::string(e.code()) == "rational-pair");
    }
}

TEST_CASE("rational pair detection") {
    Real a = oracle::golden();
    Real tol = Real("1e-12");
    CHECK(is_rational_pair(a, a, 10, tol) == 1);
    CHECK(is_rational_pair(a, 1 - a, 10, tol) == -1);
    CHECK(is_rational_pair(a, Real(0), 10, tol) == 0);
    CHECK(is_rational_pair(a, frac_part(7 * a), 10, tol) == 7);
    CHECK(!is_rational_pair(a, Real("0.25"), 10, tol).has_value());
}

TEST_CASE("brjuno partial sums at n_max = 0 (golden)") {
    ContinuedFraction cf = cf_expand(oracle::golden(), 10);
    BrjunoPartial bp = brjuno_partial(cf, 0);
    Real phi = (1 + sqrt(Real(5))) / 2;
    CHECK(close(bp.dyadic, 2 * log(phi), Real("1e-40")));
    CHECK(close(bp.quotient, log(Real(2)), Real("1e-40")));
}

TEST_CASE("brjuno partial sums: flat tail for golden, jump for a huge quotient") {
    ContinuedFraction g = cf_expand(oracle::golden(), 80);
    Real g4 = brjuno_partial(g, 4).dyadic;
    Real g10 = brjuno_partial(g, 10).dyadic;
    Real g20 = brjuno_partial(g, 20).dyadic;
    CHECK(g10 > g4);
    CHECK(g20 > g10);
    CHECK(g10 - g4 < Real("0.3"));
    CHECK(g20 - g10 < Real("0.02"));

    // one enormous quotient at level 3 adds an order-one block to the sum
    std::vector<long long> qs = {2, 8, 24000000};
    for (int i = 0; i < 30; ++i) qs.push_back(1);
    ContinuedFraction l = cf_expand(cf_value(qs), 30);
    Real l4 = brjuno_partial(l, 4).dyadic;
    Real l10 = brjuno_partial(l, 10).dyadic;
    CHECK(l10 - l4 > Real(1));
    CHECK(brjuno_partial(l, 10).quotient > Real("3.2"));
}

TEST_CASE("brjuno partial requires certified range") {
    ContinuedFraction cf = cf_expand(oracle::golden(), 10); // q_10 = 89 < 2^7
    CHECK_THROWS_AS((void)brjuno_partial(cf, 7), DepthInsufficient);
    CHECK_NOTHROW((void)brjuno_partial(cf, 6));
}

TEST_CASE("dyadic block sandwich holds with the logarithmic bound") {
    for (const Real& a : {oracle::golden(), oracle::sqrt2m1()}) {
        ContinuedFraction cf = cf_expand(a, 60);
        for (int n = 0; n <= 8; ++n) {
            SandwichReport r = check_dyadic_sandwich(cf, n);
            CHECK(r.holds);
            CHECK(r.lower <= r.middle);
            CHECK(r.middle <= r.upper);
            // the log-free variant is reported but is the coarser number
            CHECK(r.upper_nolog > r.upper);
        }
    }
}
