#include "fhkam/cohomology.hpp"

#include "fhkam/errors.hpp"

#include <cmath>

namespace fhkam {

namespace {

// 1 - e^{2 pi i y} = -2i sin(pi y) e^{i pi y}, evaluated from y reduced to
// [-1/2, 1/2) at high precision; the sine form keeps full relative accuracy
// for tiny ||y||
Complex one_minus_unit(const Real& y) {
    Real r = frac_part(y);
    if (r >= Real("0.5")) r -= 1;
    double yd = to_double(r);
    double s = std::sin(M_PI * yd);
    Complex phase = std::polar(1.0, M_PI * yd);
    return Complex(0, -2 * s) * phase;
}

} // namespace

StripFunction solve_untwisted(const StripFunction& p, const Real& alpha, const Real& res_floor) {
    Real pnorm = norm_bound(p, Real(0));
    if (!(Real(std::abs(mean(p))) <= Real("1e-14") * pnorm))
        throw NonzeroMean("cohomology",
            "solve_untwisted: data has mean " + std::to_string(std::abs(mean(p))) +
                "; the equation is only solvable for zero-mean data");

    StripFunction g(p.order, p.strip);
    g.slack = p.slack;
    for (int n = 1; n <= p.order; ++n) {
        Real y = frac_part(n * alpha);
        Real dist = dist_to_int(y);
        if (dist < res_floor)
            throw ResonanceError("cohomology",
                "solve_untwisted: ||n alpha|| below the resonance floor at n = " +
                    std::to_string(n),
                n, to_double(dist));
        Complex den = one_minus_unit(y);
        g.coeff_ref(n) = p.coeff(n) / den;
        // ||-n alpha|| = ||n alpha||; denominator is the conjugate rotation
        g.coeff_ref(-n) = p.coeff(-n) / one_minus_unit(-y);
    }
    return g;
}

StripFunction solve_twisted(const StripFunction& p, const Real& alpha, const Real& beta,
                            const Real& res_floor) {
    Complex lambda = std::polar(1.0, 2 * M_PI * to_double(frac_part(beta)));
    StripFunction g(p.order, p.strip);
    g.slack = p.slack;
    for (int n = -p.order; n <= p.order; ++n) {
        // lambda - e^{2 pi i n alpha} = lambda (1 - e^{2 pi i (n alpha - beta)})
        Real y = n * alpha - beta;
        Real dist = dist_to_int(y);
        if (dist < res_floor)
            throw ResonanceError("cohomology",
                "solve_twisted: ||n alpha - beta|| below the resonance floor at n = " +
                    std::to_string(n),
                n, to_double(dist));
        Complex den = lambda * one_minus_unit(y);
        g.coeff_ref(n) = p.coeff(n) / den;
    }
    return g;
}

} // namespace fhkam
