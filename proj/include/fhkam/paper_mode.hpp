#pragma once

#include "fhkam/kam_engine.hpp"

#include <vector>

namespace fhkam {

// Exact-magnitude complex scalar: value = e^{logmag} phase with |phase| = 1.
// The schedule thresholds sink like e^{-n^2} and leave double range near
// stage 27, so magnitudes live as high-precision natural logs while phases
// stay double complex.  A logmag at or below the zero sentinel means zero.
struct LogComplex {
    Real logmag;
    Complex phase{1, 0};

    LogComplex() : logmag(-1e12) {}
    LogComplex(Real lm, Complex ph) : logmag(std::move(lm)), phase(ph) {}
};

LogComplex lc_zero();
bool lc_is_zero(const LogComplex& a);
LogComplex lc_make_log10(double log10_mag, Complex phase);
LogComplex lc_from(Complex z);
LogComplex lc_mul(const LogComplex& a, const LogComplex& b);
LogComplex lc_div(const LogComplex& a, const LogComplex& b);
LogComplex lc_neg(const LogComplex& a);
// dominant-term form: a (1 + (b/a)); exact in the log, the 1e-16 relative
// error of the double ratio is the only loss even under full cancellation
LogComplex lc_add(const LogComplex& a, const LogComplex& b);
LogComplex lc_scale(const LogComplex& a, double c); // c > 0
double lc_log10(const LogComplex& a);
Complex lc_approx(const LogComplex& a); // double value; may under/overflow

// Model family the schedule-faithful mode runs on: a single curve mode and a
// constant multiplier coefficient with the canonical coupling rho1_t = c + t,
// no higher fiber terms.  The one-mode structure is preserved exactly by
// every stage operation, so the certified schedule bounds are checked on the
// nose instead of through grid arithmetic.
struct ToyFamily {
    Real alpha;
    Real beta;
    int mode = 1;          // curve component rho0 = c0 e^{2 pi i m theta}
    LogComplex rho0_coeff; // c0
    LogComplex rho1_base;  // c in rho1_t = c + t
};

struct ToyConfig {
    Real epsilon;          // must sit below the admissibility threshold
    Real delta = Real("0.1");
    Real aleph = Real(1000000);
    double L = 2;
    double M = 2;
    double T = 1;
    int n_max = 18;        // schedule depth
    int main_stages = 3;
    int step_limit = 64;
    int circle_samples = 64;
};

// Schedule-derived sizing constants, available before a run: the first stage
// index and the admissibility threshold the family size must stay under.
struct ToyPlan {
    int n_star = 0;
    Real log_eps_bar; // natural log of delta l_{n*} w_{n*} / 24
    Real log_l_nstar;
    Real log_w_nstar;
};
ToyPlan plan_paper_toy(const Real& alpha, const Real& beta, const ToyConfig& config);

struct ToyResult {
    int n_star = 0;
    int n_bar = 0; // first main-stage index
    double log10_eps = 0;
    double log10_eps_bar = 0;
    double log10_R_eps = 0; // zero-search radius of the preparation
    double log10_K_R = 0;
    std::vector<double> log10_W; // divisor growth weights, n = n_star..n_bar
    LogComplex t_star;
    LogComplex t_bar;
    double prep_radius_log10 = 0; // parameter-disc radius entering the main stages
    std::vector<StageTrace> prep_stages;
    std::vector<StageTrace> main_stages;
    bool all_certificates_pass = true;
};

// The staged construction on the model family with every certificate checked
// against the scheduled bound in log space: preparation stages under the
// epsilon-scaled stop rule, the initial parameter centering on the certified
// radius, then the main stages (translation loop, multiplier split, strip
// loss, parameter correction by winding + residue + Newton).  Throws typed
// errors: RationalPair, ConfigError (admissibility, discriminant, mode range),
// StageAssertion (a certified bound failed), ConvergenceError, WindingError.
ToyResult run_paper_toy(const ToyFamily& family, const ToyConfig& config);

} // namespace fhkam
