#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fhkam/errors.hpp"
#include "fhkam/kernels.hpp"
#include "fhkam/strip_fourier.hpp"
#include "oracle_helpers.hpp"

#include <cmath>
#include <cstring>

using namespace fhkam;

namespace {

StripFunction random_function(oracle::Rng& rng, int order, double scale, const Real& strip) {
    StripFunction f(order, strip);
    for (int n = -order; n <= order; ++n) f.coeff_ref(n) = rng.csym(scale);
    return f;
}

// direct double-loop convolution at full order
StripFunction conv_oracle(const StripFunction& f, const StripFunction& g) {
    StripFunction out(f.order + g.order, f.strip);
    for (int n = -out.order; n <= out.order; ++n) {
        Complex acc(0, 0);
        for (int k = -f.order; k <= f.order; ++k) {
            int m = n - k;
            if (std::abs(m) <= g.order) acc += f.coeff(k) * g.coeff(m);
        }
        out.coeff_ref(n) = acc;
    }
    return out;
}

double coeff_distance(const StripFunction& a, const StripFunction& b) {
    double worst = 0;
    int N = std::max(a.order, b.order);
    for (int n = -N; n <= N; ++n) worst = std::max(worst, std::abs(a.coeff(n) - b.coeff(n)));
    return worst;
}

} // namespace

TEST_CASE("transform basics") {
    Real delta("0.1");
    std::vector<Complex> constant(9, Complex(2.5, -1));
    StripFunction c = transform(constant, 4, delta);
    CHECK(std::abs(c.coeff(0) - Complex(2.5, -1)) < 1e-14);
    for (int n = 1; n <= 4; ++n) {
        CHECK(std::abs(c.coeff(n)) < 1e-14);
        CHECK(std::abs(c.coeff(-n)) < 1e-14);
    }

    std::vector<Complex> wave(11);
    for (int j = 0; j < 11; ++j)
        wave[j] = std::polar(1.0, 2 * M_PI * j / 11.0);
    StripFunction w = transform(wave, 5, delta);
    CHECK(std::abs(w.coeff(1) - Complex(1, 0)) < 1e-12);
    for (int n = -5; n <= 5; ++n)
        if (n != 1) CHECK(std::abs(w.coeff(n)) < 1e-12);

    CHECK_THROWS_AS((void)transform(wave, 6, delta), DomainViolation);
}

TEST_CASE("transform round trip to 1e-12 up to order 1024") {
    oracle::Rng rng(11);
    for (int order : {4, 32, 256, 1024}) {
        StripFunction f = random_function(rng, order, 1.0, Real("0.05"));
        std::vector<Complex> samples = sample_grid(f, 2 * order + 1);
        StripFunction back = transform(samples, order, f.strip);
        CHECK(coeff_distance(f, back) < 1e-12);
    }
}

TEST_CASE("exact interpolation at grid points") {
    oracle::Rng rng(12);
    StripFunction f = random_function(rng, 16, 1.0, Real("0.1"));
    int grid = 64;
    std::vector<Complex> samples = sample_grid(f, grid);
    for (int j = 0; j < grid; ++j)
        CHECK(std::abs(samples[j] - eval(f, static_cast<double>(j) / grid)) < 1e-11);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    oracle::Rng rng(13);
    for (int order : {16, 129, 512}) {
        int grid = 2 * order + 1;
        std::vector<Complex> samples(grid);
        for (Complex& s : samples) s = rng.csym(1.0);

        auto fs = kernels::dft_forward_serial(samples, order);
        auto fp = kernels::dft_forward_parallel(samples, order);
        REQUIRE(fs.size() == fp.size());
        CHECK(std::memcmp(fs.data(), fp.data(), fs.size() * sizeof(Complex)) == 0);

        auto is = kernels::dft_inverse_serial(fs, grid);
        auto ip = kernels::dft_inverse_parallel(fs, grid);
        CHECK(std::memcmp(is.data(), ip.data(), is.size() * sizeof(Complex)) == 0);
    }
}

TEST_CASE("truncate and tail partition the coefficients") {
    oracle::Rng rng(14);
    StripFunction f = random_function(rng, 20, 1.0, Real("0.1"));

    StripFunction head = truncate(f, 10);
    StripFunction rest = tail(f, 10);
    CHECK(coeff_distance(add(head, rest), f) == 0.0);
    for (int n = -10; n <= 10; ++n) CHECK(rest.coeff(n) == Complex(0, 0));

    CHECK(norm_bound(tail(f, 20), Real(0)) == 0);
    CHECK(norm_bound(tail(f, 25), Real(0)) == 0);
    StripFunction m = truncate(f, 0);
    CHECK(m.order == 0);
    CHECK(m.coeff(0) == mean(f));
}

TEST_CASE("norm_bound closed forms and sampling domination") {
    Real delta("0.2");
    StripFunction c = constant_function(Complex(3, 4), delta);
    CHECK(abs(norm_bound(c, Real("0.07")) - 5) < Real("1e-14"));

    StripFunction w = single_mode(1, Complex(1, 0), delta);
    CHECK(abs(norm_bound(w, Real("0.1")) - exp(2 * pi_hp() * Real("0.1"))) < Real("1e-14"));

    oracle::Rng rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        StripFunction f = random_function(rng, 20, 1.0, Real("0.05"));
        for (double dp : {0.0, 0.03}) {
            Real bound = norm_bound(f, Real(dp));
            double sup = 0;
            for (int j = 0; j < 4096; ++j) {
                double th = j / 4096.0;
                sup = std::max(sup, std::abs(eval(f, th, dp)));
                sup = std::max(sup, std::abs(eval(f, th, -dp)));
            }
            CHECK(Real(sup) <= bound * (1 + Real("1e-13")));
        }
    }
}

TEST_CASE("analytic tail estimate dominates the measured tail") {
    oracle::Rng rng(16);
    Real delta("0.1");
    for (int trial = 0; trial < 20; ++trial) {
        // coefficients with true strip-delta regularity: c_n = r(n) e^{-2 pi |n| delta}
        StripFunction f(40, delta);
        for (int n = -40; n <= 40; ++n) {
            double decay = std::exp(-2 * M_PI * std::abs(n) * 0.1);
            f.coeff_ref(n) = (0.2 + 0.8 * rng.uniform()) * std::polar(decay, 2 * M_PI * rng.uniform());
        }
        Real full = norm_bound(f, delta);
        for (int cut : {10, 20}) {
            for (double dp : {0.0, 0.05}) {
                Real measured = norm_bound(tail(f, cut), Real(dp));
                Real bound = tail_bound(full, cut, delta, Real(dp));
                CHECK(measured <= bound);
            }
        }
    }
    CHECK_THROWS_AS((void)tail_bound(Real(1), 4, delta, delta), DomainViolation);
}

TEST_CASE("mean and derivative") {
    Real delta("0.1");
    StripFunction c = constant_function(Complex(2, 1), delta);
    CHECK(norm_bound(derivative(c), Real(0)) == 0);

    StripFunction w = single_mode(1, Complex(1, 0), delta);
    StripFunction dw = derivative(w);
    CHECK(std::abs(dw.coeff(1) - Complex(0, 2 * M_PI)) < 1e-15);

    // sup on the real circle <= |mean| + sup of the derivative
    oracle::Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        StripFunction f = random_function(rng, 12, 1.0, delta);
        Real rhs = Real(std::abs(mean(f))) + norm_bound(derivative(f), Real(0));
        for (int j = 0; j < 256; ++j)
            CHECK(Real(std::abs(eval(f, j / 256.0))) <= rhs * (1 + Real("1e-13")));
    }
}

TEST_CASE("multiply matches the convolution oracle") {
    Real delta("0.1");
    StripFunction one = constant_function(Complex(1, 0), delta);
    oracle::Rng rng(18);
    StripFunction f = random_function(rng, 12, 1.0, delta);
    CHECK(coeff_distance(multiply(f, one, 64), f) < 1e-13);

    StripFunction wp = single_mode(1, Complex(1, 0), delta);
    StripFunction wm = single_mode(-1, Complex(1, 0), delta);
    StripFunction prod = multiply(wp, wm, 8);
    CHECK(std::abs(prod.coeff(0) - Complex(1, 0)) < 1e-13);
    CHECK(norm_bound(tail(prod, 0), Real(0)) < Real("1e-13"));

    for (int trial = 0; trial < 10; ++trial) {
        StripFunction a = random_function(rng, 12, 1.0, delta);
        StripFunction b = random_function(rng, 9, 1.0, delta);
        StripFunction fast = multiply(a, b, 64);
        StripFunction slow = conv_oracle(a, b);
        CHECK(coeff_distance(fast, slow) < 1e-12);
        CHECK(fast.order == 21);

        // capped product = truncated full product, discarded mass goes to slack
        StripFunction capped = multiply(a, b, 10);
        CHECK(coeff_distance(capped, truncate(slow, 10)) < 1e-12);
        double outside = to_double(norm_bound(tail(slow, 10), Real(0)));
        CHECK(capped.slack == doctest::Approx(outside).epsilon(1e-9));
    }
}

TEST_CASE("argument shift uses high-precision phases") {
    Real delta("0.05");
    oracle::Rng rng(19);
    StripFunction f = random_function(rng, 10, 1.0, delta);
    Real a = Real(12345) + oracle::golden(); // far outside [0,1)
    StripFunction g = shift_argument(f, a);
    for (int j = 0; j < 64; ++j) {
        double th = j / 64.0;
        double shifted = to_double(frac_part(th + a));
        CHECK(std::abs(eval(g, th) - eval(f, shifted)) < 1e-12);
    }
}

TEST_CASE("exp and log1p series") {
    Real delta("0.05");
    StripFunction zero(0, delta);
    StripFunction e0 = exp_series(zero, 4);
    CHECK(std::abs(e0.coeff(0) - Complex(1, 0)) < 1e-14);
    CHECK(norm_bound(tail(e0, 0), Real(0)) < Real("1e-14"));
    StripFunction l0 = log1p_series(zero, 4);
    CHECK(norm_bound(l0, Real(0)) < Real("1e-14"));

    oracle::Rng rng(20);
    for (int trial = 0; trial < 8; ++trial) {
        StripFunction f = random_function(rng, 6, 0.01, delta);
        StripFunction ef = exp_series(f, 64);
        // pointwise reproduction on a fine grid
        for (int j = 0; j < 1024; ++j) {
            double th = j / 1024.0;
            Complex want = std::exp(eval(f, th));
            CHECK(std::abs(eval(ef, th) - want) < 1e-10 * std::abs(want));
        }
        // exp(log1p(f)) = 1 + f
        StripFunction lf = log1p_series(f, 64);
        StripFunction back = exp_series(lf, 64);
        StripFunction expect = add(constant_function(Complex(1, 0), delta), f);
        CHECK(coeff_distance(back, expect) < 1e-10);
    }

    StripFunction big = add(constant_function(Complex(0.9, 0), delta),
                            single_mode(1, Complex(0.2, 0), delta));
    CHECK_THROWS_AS((void)log1p_series(big, 8), BranchViolation);
}

TEST_CASE("reciprocal") {
    Real delta("0.05");
    oracle::Rng rng(21);
    StripFunction f = add(constant_function(Complex(2, 0.3), delta),
                          random_function(rng, 6, 0.03, delta));
    StripFunction inv = reciprocal(f, 64);
    for (int j = 0; j < 512; ++j) {
        double th = j / 512.0;
        CHECK(std::abs(eval(inv, th) * eval(f, th) - Complex(1, 0)) < 1e-10);
    }
    StripFunction singular = single_mode(1, Complex(1, 0), delta);
    CHECK_THROWS_AS((void)reciprocal(singular, 8), DomainViolation);
}

TEST_CASE("trim drops negligible outer coefficients into slack") {
    Real delta("0.1");
    StripFunction f(6, delta);
    f.coeff_ref(0) = Complex(1, 0);
    f.coeff_ref(2) = Complex(0.5, 0);
    f.coeff_ref(5) = Complex(1e-19, 0);
    f.coeff_ref(-6) = Complex(2e-19, 0);
    StripFunction t = trim(f, 1e-17);
    CHECK(t.order == 2);
    CHECK(t.slack == doctest::Approx(3e-19).epsilon(1e-12));
    CHECK(std::abs(t.coeff(2) - Complex(0.5, 0)) == 0.0);

    StripFunction untouched = trim(f, 1e-25);
    CHECK(untouched.order == 6);
    CHECK(untouched.slack == 0.0);
}

TEST_CASE("strip width is metadata on retag") {
    StripFunction f = single_mode(3, Complex(1, 1), Real("0.1"));
    StripFunction g = f;
    g.strip = Real("0.05");
    CHECK(coeff_distance(f, g) == 0.0);
    CHECK(norm_bound(g, g.strip) < norm_bound(f, f.strip));
}
