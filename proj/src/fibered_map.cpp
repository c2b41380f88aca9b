#include "fhkam/fibered_map.hpp"

#include "fhkam/cohomology.hpp"
#include "fhkam/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fhkam {

namespace {

constexpr double two_pi_d = 6.283185307179586476925286766559;

Complex circle_point(const Real& beta) {
    return std::polar(1.0, two_pi_d * to_double(frac_part(beta)));
}

std::vector<Complex> grid_values(const StripFunction& f, int samples) {
    if (samples >= 2 * f.order + 1) return sample_grid(f, samples);
    std::vector<Complex> v(samples);
    for (int j = 0; j < samples; ++j) v[j] = eval(f, static_cast<double>(j) / samples);
    return v;
}

// multiplier lambda + rho1(theta) + sum_k k rho_k(theta) u(theta)^{k-1}
// on the uniform real grid
std::vector<Complex> multiplier_samples(const FiberedJet& F, const StripFunction& u,
                                        int samples) {
    std::vector<Complex> m(samples, F.lambda);
    std::vector<Complex> r1 = grid_values(F.rho1, samples);
    for (int j = 0; j < samples; ++j) m[j] += r1[j];
    if (!F.rho_taylor.empty()) {
        std::vector<Complex> us = grid_values(u, samples);
        for (std::size_t i = 0; i < F.rho_taylor.size(); ++i) {
            const int k = static_cast<int>(i) + 2;
            std::vector<Complex> rk = grid_values(F.rho_taylor[i], samples);
            for (int j = 0; j < samples; ++j) {
                Complex p(1, 0);
                for (int e = 0; e < k - 1; ++e) p *= us[j];
                m[j] += static_cast<double>(k) * rk[j] * p;
            }
        }
    }
    return m;
}

double binomial(int k, int j) {
    double b = 1;
    for (int i = 0; i < j; ++i) b = b * (k - i) / (i + 1);
    return b;
}

Real narrower(const Real& a, const Real& b) { return a < b ? a : b; }

// widest strip delta' <= full with norm_bound(v, delta') <= 1/4; the
// cohomological solve loses analyticity width, so the usable strip of
// exp(v) must be found, not assumed
Real pick_width(const StripFunction& v, const Real& full) {
    const Real quarter("0.25");
    if (norm_bound(v, full) <= quarter) return full;
    if (!(norm_bound(v, Real(0)) <= quarter))
        throw DomainViolation("fibered_map", "width-exhausted",
            "normal form: exponent exceeds 1/4 even on the real line");
    Real lo(0), hi = full;
    for (int it = 0; it < 60; ++it) {
        Real mid = (lo + hi) / 2;
        if (norm_bound(v, mid) <= quarter) lo = mid; else hi = mid;
    }
    return lo;
}

} // namespace

FiberedJet make_jet(const Real& alpha, const Real& beta, StripFunction rho0,
                    StripFunction rho1, std::vector<StripFunction> rho_taylor,
                    const Real& strip, const Real& disc_radius, int fourier_cap,
                    int taylor_cap) {
    if (!(disc_radius > 0) || !(disc_radius <= 1))
        throw DomainViolation("fibered_map", "domain", "make_jet: disc radius must lie in (0, 1]");
    if (!(strip > 0))
        throw DomainViolation("fibered_map", "domain", "make_jet: strip width must be positive");
    if (fourier_cap < 1 || taylor_cap < 2)
        throw DomainViolation("fibered_map", "domain", "make_jet: caps out of range");
    FiberedJet F;
    F.alpha = alpha;
    F.beta = beta;
    F.lambda = circle_point(beta);
    F.rho0 = std::move(rho0);
    F.rho1 = std::move(rho1);
    F.rho_taylor = std::move(rho_taylor);
    if (static_cast<int>(F.rho_taylor.size()) > taylor_cap - 1)
        F.rho_taylor.resize(static_cast<std::size_t>(taylor_cap) - 1);
    F.strip = strip;
    F.disc_radius = disc_radius;
    F.fourier_cap = fourier_cap;
    F.taylor_cap = taylor_cap;
    F.rho0.strip = strip;
    F.rho1.strip = strip;
    for (StripFunction& r : F.rho_taylor) r.strip = strip;
    return F;
}

StripFunction taylor_at(const FiberedJet& F, const StripFunction& u) {
    StripFunction acc(0, F.strip);
    StripFunction power = u;
    for (std::size_t i = 0; i < F.rho_taylor.size(); ++i) {
        power = multiply(power, u, F.fourier_cap); // u^k, k = i + 2
        acc = add(acc, multiply(F.rho_taylor[i], power, F.fourier_cap));
    }
    return acc;
}

StripFunction taylor_dz_at(const FiberedJet& F, const StripFunction& u) {
    StripFunction acc(0, F.strip);
    StripFunction power = constant_function(Complex(1, 0), F.strip);
    for (std::size_t i = 0; i < F.rho_taylor.size(); ++i) {
        const int k = static_cast<int>(i) + 2;
        power = multiply(power, u, F.fourier_cap); // u^{k-1}
        acc = add(acc, scale(multiply(F.rho_taylor[i], power, F.fourier_cap),
                             Complex(static_cast<double>(k), 0)));
    }
    return acc;
}

StripFunction eta_term(const FiberedJet& F, const StripFunction& u0) {
    if (!(norm_bound(u0, narrower(F.strip, u0.strip)) < F.disc_radius))
        throw DomainViolation("fibered_map", "radius-exhausted",
            "eta_term: translation exceeds the fiber disc");
    return add(multiply(F.rho1, u0, F.fourier_cap), taylor_at(F, u0));
}

std::pair<Complex, Complex> evaluate(const FiberedJet& F, Complex theta, Complex z) {
    if (!(Real(std::abs(theta.imag())) < F.strip))
        throw DomainViolation("fibered_map", "domain", "evaluate: theta outside the strip");
    if (!(Real(std::abs(z)) < F.disc_radius))
        throw DomainViolation("fibered_map", "domain", "evaluate: z outside the fiber disc");
    Complex fz = eval(F.rho0, theta.real(), theta.imag());
    fz += (F.lambda + eval(F.rho1, theta.real(), theta.imag())) * z;
    Complex zp = z;
    for (std::size_t i = 0; i < F.rho_taylor.size(); ++i) {
        zp *= z;
        fz += eval(F.rho_taylor[i], theta.real(), theta.imag()) * zp;
    }
    Complex theta_next = theta + Complex(to_double(F.alpha), 0);
    return {theta_next, fz};
}

FiberedJet conjugate_translation(const FiberedJet& F, const StripFunction& u0) {
    // a narrower u0 narrows the conjugated jet: width loss is explicit
    Real width = narrower(F.strip, u0.strip);
    Real u0_norm = norm_bound(u0, width);
    if (!(u0_norm < F.disc_radius))
        throw DomainViolation("fibered_map", "radius-exhausted",
            "conjugate_translation: new disc radius would be nonpositive");

    FiberedJet G = F;
    G.strip = width;
    G.disc_radius = F.disc_radius - u0_norm;

    // rho0' = rho0 + lambda u0 - u0(. + alpha) + rho1 u0 + rho(., u0)
    StripFunction linear_part = subtract(scale(u0, F.lambda), shift_argument(u0, F.alpha));
    G.rho0 = add(add(F.rho0, linear_part), eta_term(F, u0));

    // rho1' = rho1 + d_z rho(., u0)
    G.rho1 = add(F.rho1, taylor_dz_at(F, u0));

    // rho_j' = sum_{k >= j} C(k, j) rho_k u0^{k-j}
    const int K = static_cast<int>(F.rho_taylor.size()) + 1; // largest Taylor index
    std::vector<StripFunction> powers; // u0^0 .. u0^{K-2}
    powers.push_back(constant_function(Complex(1, 0), F.strip));
    for (int e = 1; e <= K - 2; ++e)
        powers.push_back(multiply(powers.back(), u0, F.fourier_cap));
    for (int j = 2; j <= K; ++j) {
        // k = j carries u0^0 = 1: taken verbatim, no grid round trip
        StripFunction acc = F.rho_taylor[static_cast<std::size_t>(j) - 2];
        for (int k = j + 1; k <= K; ++k) {
            StripFunction term =
                multiply(F.rho_taylor[static_cast<std::size_t>(k) - 2],
                         powers[static_cast<std::size_t>(k - j)], F.fourier_cap);
            acc = add(acc, scale(term, Complex(binomial(k, j), 0)));
        }
        G.rho_taylor[static_cast<std::size_t>(j) - 2] = acc;
    }
    G.rho0.strip = width;
    G.rho1.strip = width;
    for (StripFunction& r : G.rho_taylor) r.strip = width;
    return G;
}

FiberedJet conjugate_linear(const FiberedJet& F, const StripFunction& u1, Complex lambda_new) {
    Real width = narrower(F.strip, u1.strip);
    StripFunction one = constant_function(Complex(1, 0), width);
    if (!(norm_bound(subtract(u1, one), width) < 1))
        throw DomainViolation("fibered_map", "u1-near-vanishing",
            "conjugate_linear: norm_bound(u1 - 1) >= 1; nonvanishing not certified");

    FiberedJet G = F;
    G.strip = width;
    StripFunction inv_shift = reciprocal(shift_argument(u1, F.alpha), F.fourier_cap);

    G.rho0 = multiply(F.rho0, inv_shift, F.fourier_cap);

    // multiplier function (lambda + rho1) u1 / u1(. + alpha), re-split at lambda_new
    StripFunction mult = multiply(add(constant_function(F.lambda, F.strip), F.rho1),
                                  multiply(u1, inv_shift, F.fourier_cap), F.fourier_cap);
    G.lambda = lambda_new;
    G.rho1 = subtract(mult, constant_function(lambda_new, F.strip));

    // rho_k' = rho_k u1^k / u1(. + alpha)
    StripFunction power = u1;
    for (std::size_t i = 0; i < F.rho_taylor.size(); ++i) {
        power = multiply(power, u1, F.fourier_cap); // u1^k, k = i + 2
        G.rho_taylor[i] =
            multiply(F.rho_taylor[i], multiply(power, inv_shift, F.fourier_cap), F.fourier_cap);
    }

    G.rho0.strip = width;
    G.rho1.strip = width;
    for (StripFunction& r : G.rho_taylor) r.strip = width;

    Real r = F.disc_radius / norm_bound(u1, width);
    G.disc_radius = r > 1 ? Real(1) : r;
    return G;
}

double fibered_rotation_number(const FiberedJet& F, const StripFunction& u, int samples) {
    std::vector<Complex> m = multiplier_samples(F, u, samples);
    if (std::abs(m[0]) == 0.0)
        throw DomainViolation("fibered_map", "vanishing-derivative",
            "rotation number: multiplier vanishes on the sample grid");
    double first_raw = std::arg(m[0]);
    double prev_raw = first_raw;
    double deviation = 0; // unwrapped phase minus first_raw: small, summed exactly-ish
    double acc = 0;
    for (int j = 1; j <= samples; ++j) {
        Complex mj = m[static_cast<std::size_t>(j % samples)];
        if (std::abs(mj) == 0.0)
            throw DomainViolation("fibered_map", "vanishing-derivative",
                "rotation number: multiplier vanishes on the sample grid");
        double raw = std::arg(mj);
        double step = raw - prev_raw;
        if (step > M_PI) step -= two_pi_d;
        else if (step < -M_PI) step += two_pi_d;
        if (std::abs(step) > M_PI / 2)
            throw DomainViolation("fibered_map", "unwrap-ambiguity",
                "rotation number: consecutive phase jump above pi/2; the grid cannot "
                "certify the unwrapped branch");
        deviation += step;
        prev_raw = raw;
        if (j < samples) acc += deviation;
    }
    long long degree = std::llround(deviation / two_pi_d);
    if (degree != 0)
        throw DomainViolation("fibered_map", "unwrap-ambiguity",
            "rotation number: multiplier has winding degree " + std::to_string(degree) +
                " along the curve; the mean-phase formula needs degree zero");
    double rot = (first_raw + acc / samples) / two_pi_d;
    rot -= std::floor(rot);
    return rot;
}

double indifference_defect(const FiberedJet& F, const StripFunction& u, int samples) {
    std::vector<Complex> m = multiplier_samples(F, u, samples);
    double acc = 0;
    for (const Complex& mj : m) {
        double a = std::abs(mj);
        if (a == 0.0)
            throw DomainViolation("fibered_map", "vanishing-derivative",
                "indifference defect: multiplier vanishes on the sample grid");
        acc += std::log(a);
    }
    return std::abs(acc / samples);
}

double invariance_residual(const FiberedJet& F, const StripFunction& u, int samples) {
    std::vector<Complex> us = grid_values(u, samples);
    std::vector<Complex> r0 = grid_values(F.rho0, samples);
    std::vector<Complex> r1 = grid_values(F.rho1, samples);
    std::vector<Complex> ushift = grid_values(shift_argument(u, F.alpha), samples);
    std::vector<std::vector<Complex>> rk;
    rk.reserve(F.rho_taylor.size());
    for (const StripFunction& r : F.rho_taylor) rk.push_back(grid_values(r, samples));
    double worst = 0;
    for (int j = 0; j < samples; ++j) {
        Complex fz = r0[j] + (F.lambda + r1[j]) * us[j];
        Complex zp = us[j];
        for (std::size_t i = 0; i < rk.size(); ++i) {
            zp *= us[j];
            fz += rk[i][j] * zp;
        }
        worst = std::max(worst, std::abs(fz - ushift[j]));
    }
    return worst;
}

std::pair<FiberedJet, AffineConjugacy> normal_form_at_curve(const FiberedJet& F,
                                                            const StripFunction& u) {
    if (!(invariance_residual(F, u, 2048) <= 1e-10))
        throw DomainViolation("fibered_map", "not-invariant",
            "normal form: curve invariance residual exceeds 1e-10");
    if (!(indifference_defect(F, u) <= 1e-8))
        throw DomainViolation("fibered_map", "not-indifferent",
            "normal form: indifference defect exceeds 1e-8");

    FiberedJet translated = conjugate_translation(F, u);

    // v - v(. + alpha) = mean(w) - w with w = log1p(rho1' / lambda); the
    // subtracted mean is the defect-sized non-solvable component and moves
    // into rho1 of the normal form (lambda itself stays the circle point)
    StripFunction w = log1p_series(scale(translated.rho1, Complex(1, 0) / F.lambda),
                                   F.fourier_cap);
    StripFunction p = scale(subtract(w, constant_function(mean(w), translated.strip)),
                            Complex(-1, 0));
    // trim grid-composition noise (the conjugacy returned is exactly the
    // trimmed one), then find a strip where exp(v) is tame: the solve loses
    // width near the small divisors
    StripFunction v = trim(solve_untwisted(p, F.alpha), 1e-14);
    v.strip = pick_width(v, translated.strip);
    StripFunction u1 = trim(exp_series(v, F.fourier_cap), 1e-14);
    u1.strip = v.strip;

    FiberedJet normal = conjugate_linear(translated, u1, F.lambda);
    if (!(norm_bound(normal.rho0, Real(0)) <= Real("1e-8")) ||
        !(norm_bound(normal.rho1, Real(0)) <= Real("1e-8")))
        throw StageAssertion("fibered_map",
            "normal form: conjugated jet misses the 1e-8 bound on rho0 / rho1");
    return {normal, AffineConjugacy{u, u1}};
}

} // namespace fhkam
