#pragma once

#include "fhkam/strip_fourier.hpp"

namespace fhkam {

// Truncated cohomological equations, solved modewise.  Denominators are
// evaluated from the high-precision distances ||n alpha|| resp. ||n alpha -
// beta|| (as 2 sin(pi dist) up to phase), so no accuracy is lost to
// cancellation even for near-resonant modes; a distance below `res_floor`
// raises ResonanceError with the offending mode.

// g(theta) - g(theta + alpha) = p(theta); requires |mean(p)| <= 1e-14 ||p||
// (NonzeroMean otherwise); returns the zero-mean solution
// g_hat(n) = p_hat(n) / (1 - e^{2 pi i n alpha}).
StripFunction solve_untwisted(const StripFunction& p, const Real& alpha,
                              const Real& res_floor = Real("1e-30"));

// lambda g(theta) - g(theta + alpha) = p(theta) with lambda = e^{2 pi i beta}.
// The twist enters as the angle beta, not the circle point: the resonance
// certificate needs ||n alpha - beta|| at full precision.  Solution
// g_hat(n) = p_hat(n) / (lambda - e^{2 pi i n alpha}) for every |n| <= order.
StripFunction solve_twisted(const StripFunction& p, const Real& alpha, const Real& beta,
                            const Real& res_floor = Real("1e-30"));

} // namespace fhkam
