#pragma once

#include "fhkam/reals.hpp"

#include <vector>

namespace fhkam {

// Finite Fourier series sum_{|n| <= order} c_n e^{2 pi i n theta} regarded as
// an analytic function on the strip |Im theta| <= strip.  The strip width is
// metadata: narrowing it is a retag, coefficients never change.  `slack`
// accumulates the coefficient mass discarded by nonlinear grid operations and
// trimming; it is diagnostic (reported in traces) and never enters certified
// bounds.
struct StripFunction {
    int order = 0;
    Real strip;
    double slack = 0;
    std::vector<Complex> coeffs; // c_{-order}..c_{order}

    StripFunction() : coeffs(1, Complex(0, 0)) {}
    StripFunction(int n, Real delta)
        : order(n), strip(std::move(delta)), coeffs(2 * static_cast<std::size_t>(n) + 1) {}

    Complex coeff(int n) const {
        if (n < -order || n > order) return {0, 0};
        return coeffs[static_cast<std::size_t>(n + order)];
    }
    Complex& coeff_ref(int n) { return coeffs[static_cast<std::size_t>(n + order)]; }
};

StripFunction constant_function(Complex c, const Real& strip);
StripFunction single_mode(int n, Complex c, const Real& strip);

// forward transform from 2*order+1 or more samples on the uniform real grid
// j / samples.size(); exact interpolation for series of that order
StripFunction transform(const std::vector<Complex>& samples, int order, const Real& strip);

// values on the uniform real grid of the given size (>= 2*order+1)
std::vector<Complex> sample_grid(const StripFunction& f, int grid);

// evaluation anywhere on the strip; theta_im is the imaginary part
Complex eval(const StripFunction& f, double theta_re, double theta_im = 0);

StripFunction truncate(const StripFunction& f, int new_order);
StripFunction tail(const StripFunction& f, int new_order); // f - truncate(f)

// certified sup bound on the strip of half-width delta_prime:
// sum |c_n| e^{2 pi |n| delta_prime} (exceeds double range for large orders,
// hence Real)
Real norm_bound(const StripFunction& f, const Real& delta_prime);

// analytic tail estimate ||f|| e^{-2 pi N (delta - delta')} / (delta - delta')
// with the front constant set to 1; requires delta_prime < delta
Real tail_bound(const Real& f_full_norm, int N, const Real& delta, const Real& delta_prime);

Complex mean(const StripFunction& f);
StripFunction derivative(const StripFunction& f);

StripFunction add(const StripFunction& f, const StripFunction& g);
StripFunction subtract(const StripFunction& f, const StripFunction& g);
StripFunction scale(const StripFunction& f, Complex factor);

// coefficient convolution through an alias-free oversampled grid, truncated
// at `cap`; exact when order(f) + order(g) <= cap
StripFunction multiply(const StripFunction& f, const StripFunction& g, int cap);

// f(theta + a) via high-precision phase rotation of the coefficients
StripFunction shift_argument(const StripFunction& f, const Real& a);

// pointwise exp / log(1 + .) through a 4x oversampled grid, retruncated at
// `cap` with the discarded mass added to slack.  log1p requires
// norm_bound(f, strip) < 1 so the principal branch is defined on the whole
// strip (BranchViolation otherwise).
StripFunction exp_series(const StripFunction& f, int cap);
StripFunction log1p_series(const StripFunction& f, int cap);

// pointwise 1 / (eval f); requires a certified lower bound away from zero:
// |mean| - norm_bound(f - mean, strip) > 0 (DomainViolation otherwise)
StripFunction reciprocal(const StripFunction& f, int cap);

// drop trailing coefficients of magnitude < floor (both ends, symmetrically),
// adding the dropped mass to slack
StripFunction trim(const StripFunction& f, double floor);

} // namespace fhkam
