#include "fhkam/strip_fourier.hpp"

#include "fhkam/errors.hpp"
#include "fhkam/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace fhkam {

namespace {

constexpr double two_pi_d = 6.283185307179586476925286766559;

Real min_strip(const StripFunction& f, const StripFunction& g) {
    return f.strip < g.strip ? f.strip : g.strip;
}

// sum of |c_n| over cap < |n| <= order of f
double dropped_mass(const StripFunction& f, int cap) {
    double m = 0;
    for (int n = cap + 1; n <= f.order; ++n)
        m += std::abs(f.coeff(n)) + std::abs(f.coeff(-n));
    return m;
}

// grid -> coefficients at the full order the grid resolves, truncated to cap
// with slack accounting
StripFunction from_grid(const std::vector<Complex>& samples, int cap, const Real& strip,
                        double inherited_slack) {
    int full = static_cast<int>((samples.size() - 1) / 2);
    StripFunction wide = transform(samples, full, strip);
    StripFunction out = truncate(wide, std::min(cap, full));
    out.slack = inherited_slack + dropped_mass(wide, out.order);
    return out;
}

} // namespace

StripFunction constant_function(Complex c, const Real& strip) {
    StripFunction f(0, strip);
    f.coeffs[0] = c;
    return f;
}

StripFunction single_mode(int n, Complex c, const Real& strip) {
    StripFunction f(std::abs(n), strip);
    f.coeff_ref(n) = c;
    return f;
}

StripFunction transform(const std::vector<Complex>& samples, int order, const Real& strip) {
    StripFunction f(order, strip);
    f.coeffs = kernels::dft_forward_parallel(samples, order);
    return f;
}

std::vector<Complex> sample_grid(const StripFunction& f, int grid) {
    return kernels::dft_inverse_parallel(f.coeffs, grid);
}

Complex eval(const StripFunction& f, double theta_re, double theta_im) {
    Complex acc(0, 0);
    for (int n = -f.order; n <= f.order; ++n) {
        double mag = std::exp(-two_pi_d * n * theta_im);
        double ang = two_pi_d * n * (theta_re - std::floor(theta_re));
        acc += f.coeff(n) * std::polar(mag, ang);
    }
    return acc;
}

StripFunction truncate(const StripFunction& f, int new_order) {
    if (new_order < 0)
        throw DomainViolation("strip_fourier", "domain", "truncate: order must be >= 0");
    if (new_order >= f.order) return f;
    StripFunction out(new_order, f.strip);
    out.slack = f.slack;
    for (int n = -new_order; n <= new_order; ++n) out.coeff_ref(n) = f.coeff(n);
    return out;
}

StripFunction tail(const StripFunction& f, int new_order) {
    if (new_order < 0)
        throw DomainViolation("strip_fourier", "domain", "tail: order must be >= 0");
    StripFunction out(f.order, f.strip);
    for (int n = -f.order; n <= f.order; ++n)
        if (std::abs(n) > new_order) out.coeff_ref(n) = f.coeff(n);
    return out;
}

Real norm_bound(const StripFunction& f, const Real& delta_prime) {
    if (delta_prime < 0)
        throw DomainViolation("strip_fourier", "domain", "norm_bound: width must be >= 0");
    Real growth = exp(2 * pi_hp() * delta_prime);
    Real acc = std::abs(f.coeff(0));
    Real p = 1;
    for (int n = 1; n <= f.order; ++n) {
        p *= growth;
        acc += p * (std::abs(f.coeff(n)) + std::abs(f.coeff(-n)));
    }
    return acc;
}

Real tail_bound(const Real& f_full_norm, int N, const Real& delta, const Real& delta_prime) {
    if (!(delta_prime >= 0) || !(delta_prime < delta))
        throw DomainViolation("strip_fourier", "domain",
            "tail_bound: requires 0 <= delta_prime < delta");
    return f_full_norm * exp(-2 * pi_hp() * N * (delta - delta_prime)) / (delta - delta_prime);
}

Complex mean(const StripFunction& f) { return f.coeff(0); }

StripFunction derivative(const StripFunction& f) {
    StripFunction out(f.order, f.strip);
    for (int n = -f.order; n <= f.order; ++n)
        out.coeff_ref(n) = f.coeff(n) * Complex(0, two_pi_d * n);
    return out;
}

StripFunction add(const StripFunction& f, const StripFunction& g) {
    StripFunction out(std::max(f.order, g.order), min_strip(f, g));
    out.slack = f.slack + g.slack;
    for (int n = -out.order; n <= out.order; ++n) out.coeff_ref(n) = f.coeff(n) + g.coeff(n);
    return out;
}

StripFunction subtract(const StripFunction& f, const StripFunction& g) {
    StripFunction out(std::max(f.order, g.order), min_strip(f, g));
    out.slack = f.slack + g.slack;
    for (int n = -out.order; n <= out.order; ++n) out.coeff_ref(n) = f.coeff(n) - g.coeff(n);
    return out;
}

StripFunction scale(const StripFunction& f, Complex factor) {
    StripFunction out = f;
    for (Complex& c : out.coeffs) c *= factor;
    out.slack = f.slack * std::abs(factor);
    return out;
}

StripFunction multiply(const StripFunction& f, const StripFunction& g, int cap) {
    if (cap < 0)
        throw DomainViolation("strip_fourier", "domain", "multiply: cap must be >= 0");
    int full = f.order + g.order;
    int grid = 2 * full + 1;
    std::vector<Complex> a = sample_grid(f, grid);
    std::vector<Complex> b = sample_grid(g, grid);
    for (int j = 0; j < grid; ++j) a[j] *= b[j];
    return from_grid(a, cap, min_strip(f, g), f.slack + g.slack);
}

StripFunction shift_argument(const StripFunction& f, const Real& a) {
    StripFunction out = f;
    for (int n = -f.order; n <= f.order; ++n) {
        double ang = two_pi_d * to_double(frac_part(n * a));
        out.coeff_ref(n) = f.coeff(n) * std::polar(1.0, ang);
    }
    return out;
}

StripFunction exp_series(const StripFunction& f, int cap) {
    int grid = std::max(4 * (2 * cap + 1), 2 * f.order + 1);
    std::vector<Complex> v = sample_grid(f, grid);
    for (Complex& x : v) x = std::exp(x);
    return from_grid(v, cap, f.strip, f.slack);
}

StripFunction log1p_series(const StripFunction& f, int cap) {
    if (!(norm_bound(f, f.strip) < 1))
        throw BranchViolation("strip_fourier",
            "log1p: certified sup of the argument on the strip reaches 1; "
            "the principal branch is not certified");
    int grid = std::max(4 * (2 * cap + 1), 2 * f.order + 1);
    std::vector<Complex> v = sample_grid(f, grid);
    for (Complex& x : v) x = std::log(Complex(1, 0) + x);
    return from_grid(v, cap, f.strip, f.slack);
}

StripFunction reciprocal(const StripFunction& f, int cap) {
    Complex m = mean(f);
    StripFunction centered = subtract(f, constant_function(m, f.strip));
    if (!(Real(std::abs(m)) - norm_bound(centered, f.strip) > 0))
        throw DomainViolation("strip_fourier", "reciprocal-singular",
            "reciprocal: certified lower bound on |f| over the strip is not positive");
    int grid = std::max(4 * (2 * cap + 1), 2 * f.order + 1);
    std::vector<Complex> v = sample_grid(f, grid);
    for (Complex& x : v) x = Complex(1, 0) / x;
    return from_grid(v, cap, f.strip, f.slack);
}

StripFunction trim(const StripFunction& f, double floor) {
    int keep = 0;
    for (int n = f.order; n >= 1; --n) {
        if (std::abs(f.coeff(n)) >= floor || std::abs(f.coeff(-n)) >= floor) {
            keep = n;
            break;
        }
    }
    StripFunction out = truncate(f, keep);
    out.slack = f.slack + dropped_mass(f, keep);
    return out;
}

} // namespace fhkam
