#pragma once

#include "fhkam/strip_fourier.hpp"

#include <utility>
#include <vector>

namespace fhkam {

// Jet of the skew map F(theta, z) = (theta + alpha, rho0(theta) +
// (lambda + rho1(theta)) z + sum_{k>=2} rho_k(theta) z^k) over the strip
// |Im theta| <= strip, fiberwise on the disc |z| < disc_radius.
//
// lambda = e^{2 pi i beta} is kept separate from rho1 (exact circle point vs
// perturbation) so conjugations can re-split the multiplier exactly.  beta is
// the high-precision angle and stays the authoritative rotation datum; the
// cached lambda is its double-precision circle point.
struct FiberedJet {
    Real alpha;
    Real beta;
    Complex lambda;
    StripFunction rho0;
    StripFunction rho1;
    std::vector<StripFunction> rho_taylor; // rho_k, k = 2 .. 1 + size
    Real strip;
    Real disc_radius; // in (0, 1]
    int fourier_cap = 128;
    int taylor_cap = 8;
};

// h(theta, z) = (theta, u0(theta) + u1(theta) z)
struct AffineConjugacy {
    StripFunction u0;
    StripFunction u1;
};

struct InvariantCurve {
    StripFunction curve;
    Complex t_bar;
    Real strip;
};

// validates invariants, retags component strips, caches lambda from beta
FiberedJet make_jet(const Real& alpha, const Real& beta, StripFunction rho0,
                    StripFunction rho1, std::vector<StripFunction> rho_taylor,
                    const Real& strip, const Real& disc_radius, int fourier_cap,
                    int taylor_cap);

// sum_k rho_k(theta) u(theta)^k and its z-derivative sum_k k rho_k u^{k-1}
StripFunction taylor_at(const FiberedJet& F, const StripFunction& u);
StripFunction taylor_dz_at(const FiberedJet& F, const StripFunction& u);

// rho1 u + sum_k rho_k u^k: the quadratic-and-up error after a translation
// step; requires norm_bound(u) < disc_radius
StripFunction eta_term(const FiberedJet& F, const StripFunction& u0);

// (theta + alpha, f_theta(z)); requires |Im theta| < strip, |z| < disc_radius
std::pair<Complex, Complex> evaluate(const FiberedJet& F, Complex theta, Complex z);

// jet of h^{-1} o F o h for h = (theta, u0(theta) + z); the new disc radius
// is disc_radius - norm_bound(u0) (radius-exhausted if nonpositive).  The
// conjugated jet lives on min(F.strip, u0.strip): a conjugacy factor tagged
// with a narrower strip makes the width loss of the step explicit.
FiberedJet conjugate_translation(const FiberedJet& F, const StripFunction& u0);

// jet of h^{-1} o F o h for h = (theta, u1(theta) z); requires
// norm_bound(u1 - 1) < 1 on min(F.strip, u1.strip) (certifies nonvanishing
// and degree zero), and the conjugated jet lives on that strip.  The
// multiplier function (lambda + rho1) u1 / u1(. + alpha) is re-split as
// lambda_new + rho1_new; the caller chooses the exact circle point lambda_new
// (the staged algorithm always passes the jet's own lambda, keeping beta the
// anchor).  New disc radius: disc_radius / norm_bound(u1), clamped to 1.
FiberedJet conjugate_linear(const FiberedJet& F, const StripFunction& u1, Complex lambda_new);

// (1/2 pi) mean of the unwrapped argument of the multiplier
// lambda + rho1(theta) + sum_k k rho_k(theta) u(theta)^{k-1} along the curve,
// mod 1.  Throws DomainViolation("unwrap-ambiguity") if consecutive phase
// jumps exceed pi/2 or the multiplier has nonzero winding.
double fibered_rotation_number(const FiberedJet& F, const StripFunction& u, int samples = 4096);

// |quadrature mean of log |multiplier||; zero means the curve is indifferent
double indifference_defect(const FiberedJet& F, const StripFunction& u, int samples = 4096);

// max over the grid of |f_theta(u(theta)) - u(theta + alpha)|
double invariance_residual(const FiberedJet& F, const StripFunction& u, int samples);

// conjugates F at an invariant indifferent curve to rho0 = rho1 = 0 up to
// certified 1e-8 bounds: translation by u, then the degree-zero linear
// conjugacy u1 = exp v with v - v(. + alpha) = mean-corrected -log1p(rho1 /
// lambda).  Requires invariance_residual <= 1e-10 and indifference_defect <=
// 1e-8.
std::pair<FiberedJet, AffineConjugacy> normal_form_at_curve(const FiberedJet& F,
                                                            const StripFunction& u);

} // namespace fhkam
