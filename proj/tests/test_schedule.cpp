#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fhkam/errors.hpp"
#include "fhkam/schedule.hpp"
#include "oracle_helpers.hpp"

#include <algorithm>

using namespace fhkam;

namespace {

KamSchedule golden_schedule(int n_max, double aleph = 1e6) {
    ContinuedFraction cf = cf_expand(oracle::golden(), 60);
    return build_schedule(cf, oracle::golden() / 2, Real(aleph), n_max);
}

} // namespace

TEST_CASE("row zero matches the closed formula") {
    KamSchedule s = golden_schedule(4);
    Real a = oracle::golden();
    ContinuedFraction cf = cf_expand(a, 20);
    PairDivisorTable pair(cf, a / 2);
    Real A0 = pair.at(1).gamma;
    Real B0 = worst_divisor(cf, 1).gamma;
    CHECK(abs(s.log_l[0] + log(16 * Real(1e6) * A0 * B0)) < Real("1e-40"));
    CHECK(abs(s.log_w[0] - (s.log_l[0] - log(Real(1e6)) - s.logA[0])) < Real("1e-40"));
}

TEST_CASE("consecutive rows satisfy the ratio identity") {
    KamSchedule s = golden_schedule(20);
    for (int n = 0; n < 20; ++n) {
        Real expect = -Real(2 * n + 1) + s.logA[n] + s.logB[n] - s.logA[n + 1] -
                      s.logB[n + 1] - log(Real(2));
        CHECK(abs((s.log_l[n + 1] - s.log_l[n]) - expect) < Real("1e-40"));
    }
}

TEST_CASE("width-loss root matches an independent bisection oracle") {
    KamSchedule s = golden_schedule(4);
    // oracle works on the unlogged equation aleph l0 e^{-2 pi d} / d = l1
    Real l0 = exp(s.log_l[0]);
    Real l1 = exp(s.log_l[1]);
    Real aleph = s.aleph;
    auto f = [&](const Real& d) { return aleph * l0 * exp(-2 * pi_hp() * d) / d - l1; };
    Real lo("1e-8"), hi(100);
    REQUIRE(f(lo) > 0);
    REQUIRE(f(hi) < 0);
    for (int i = 0; i < 200; ++i) {
        Real mid = (lo + hi) / 2;
        (f(mid) > 0 ? lo : hi) = mid;
    }
    Real d_oracle = (lo + hi) / 2;
    CHECK(abs(s.d1[0] - d_oracle) < Real("1e-12") * d_oracle);
}

TEST_CASE("forward substitution reproduces the next row") {
    KamSchedule s = golden_schedule(60);
    Real la = log(s.aleph);
    Real two_pi = 2 * pi_hp();
    for (int n = 0; n < 60; ++n) {
        Real p2n = pow(Real(2), n);
        // log of: aleph l_n e^{-2 pi 2^n d1} / d1 versus l_{n+1}
        Real lhs1 = la + s.log_l[n] - two_pi * p2n * s.d1[n] - log(s.d1[n]);
        CHECK(abs(lhs1 - s.log_l[n + 1]) < Real("1e-12"));
        // log of: aleph w_n e^{-2 pi 2^n d0} / d0 versus w_{n+1}/4
        Real lhs0 = la + s.log_w[n] - two_pi * p2n * s.d0[n] - log(s.d0[n]);
        CHECK(abs(lhs0 - (s.log_w[n + 1] - log(Real(4)))) < Real("1e-12"));
        CHECK(s.d0[n] > 0);
        CHECK(s.d1[n] > 0);
    }
}

TEST_CASE("solve_width_loss at constructed fixed points") {
    Real d = solve_width_loss(-2 * pi_hp() * 8, 3);
    CHECK(abs(d - 1) < Real("1e-13"));
    Real half = solve_width_loss(-pi_hp() - log(Real("0.5")), 0);
    CHECK(abs(half - Real("0.5")) < Real("1e-13"));
}

TEST_CASE("n_star equals the suffix-scan oracle and the strip recursion holds") {
    KamSchedule s = golden_schedule(60);
    Real delta("0.1");
    int got = choose_n_star(s, delta);

    // independent linear scan over suffix sums
    int expect = -1;
    for (int n = 0; n < 60 && expect < 0; ++n) {
        Real tail = 0;
        for (int m = n; m < 60; ++m) tail += std::max(s.d0[m], s.d1[m]);
        if (tail <= delta / 4) expect = n;
    }
    REQUIRE(expect >= 0);
    CHECK(got == expect);
    CHECK(s.n_star == expect);

    CHECK(abs(s.delta_n[s.n_star] - 3 * delta / 4) < Real("1e-40"));
    for (int n = s.n_star; n < 60; ++n) {
        Real next = s.delta_n[n] - std::max(s.d0[n], s.d1[n]);
        CHECK(abs(s.delta_n[n + 1] - next) < Real("1e-40"));
        CHECK(s.delta_n[n + 1] < s.delta_n[n]);
        CHECK(s.delta_n[n + 1] > delta / 2);
    }
}

TEST_CASE("huge delta selects the first index") {
    KamSchedule s = golden_schedule(20);
    int got = choose_n_star(s, Real(100));
    CHECK(got == 0);
    CHECK(abs(s.delta_n[0] - Real(75)) < Real("1e-40"));
}

TEST_CASE("unreachable delta raises the typed error") {
    KamSchedule s = golden_schedule(20);
    try {
        choose_n_star(s, Real(0));
        FAIL("expected DomainViolation");
    } catch (const DomainViolation& e) {
        CHECK(std::string(e.code()) == "n-max-too-small");
    }
    CHECK_THROWS_AS(choose_n_star(s, Real("1e-9")), DomainViolation);
}

TEST_CASE("largeness inequalities pass over the full table") {
    KamSchedule s = golden_schedule(60);
    LemmaReport r = verify_lemma_properties(s);
    REQUIRE(r.items.size() == 4);
    for (const auto& item : r.items) {
        CHECK(item.pass);
        CHECK(item.value < item.bound);
    }
    CHECK(r.all_pass);
    CHECK(r.sum_d0 > 0);
    CHECK(r.sum_d1 > 0);
}

TEST_CASE("report-only contract near the aleph floor") {
    KamSchedule s = golden_schedule(10, 2.001);
    LemmaReport r = verify_lemma_properties(s); // must not throw
    CHECK(r.items.size() == 4);
}

TEST_CASE("log-space values stay finite where doubles underflow") {
    KamSchedule s = golden_schedule(32);
    CHECK(s.log_l[30] < Real(-900));
    CHECK(s.log_l[30] > Real(-1100));
    // the same quantity as a double is an underflown zero
    CHECK(to_double(exp(s.log_l[30])) == 0.0);
    CHECK(to_double(exp(s.log_l[27])) == 0.0);
}

TEST_CASE("l_n decreases monotonically") {
    KamSchedule s = golden_schedule(40);
    for (int n = 0; n < 40; ++n) CHECK(s.log_l[n + 1] < s.log_l[n]);
}

TEST_CASE("aleph floor is enforced at build time") {
    ContinuedFraction cf = cf_expand(oracle::golden(), 30);
    CHECK_THROWS_AS((void)build_schedule(cf, oracle::golden() / 2, Real(2), 4), ConfigError);
    CHECK_THROWS_AS((void)build_schedule(cf, oracle::golden() / 2, Real("1e6"), 0), ConfigError);
}
