#include "fhkam/paper_mode.hpp"

#include "fhkam/errors.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace fhkam {

namespace {

constexpr double two_pi_d = 6.283185307179586476925286766559;
constexpr double zero_threshold = -1e11; // logmag at or below this means zero
constexpr double log10_floor = -400;

double ln_to_log10(const Real& natural_log) {
    return to_double(natural_log) / std::log(10.0);
}

// lambda - e^{2 pi i m alpha}: the magnitude from the high-precision distance
// (2 sin(pi ||m alpha - beta||), no cancellation), the phase in double
LogComplex twisted_den(const Real& alpha, const Real& beta, Complex lambda_c, int m) {
    Real d = dist_to_int(m * alpha - beta);
    LogComplex den;
    den.logmag = log(2 * sin(pi_hp() * d));
    Complex e_m = std::polar(1.0, two_pi_d * to_double(frac_part(m * alpha)));
    Complex diff = lambda_c - e_m;
    double a = std::abs(diff);
    den.phase = a > 0 ? diff / a : Complex(1, 0);
    return den;
}

struct ToyState {
    LogComplex c0; // curve coefficient at the family mode
    LogComplex r;  // multiplier coefficient at the current parameter
    Real R_disc;   // fiber disc radius
};

// translation steps until the certified curve size on the stage strip drops
// under log_stop; each step solves the one-mode twisted equation exactly and
// re-populates the same mode through eta = rho1 u0
int toy_translation_loop(ToyState& st, int mode, const LogComplex& den, const Real& delta_n,
                         const Real& log_stop, int step_limit, StageTrace& tr) {
    Real weight = 2 * pi_hp() * delta_n * mode;
    int i = 0;
    while (true) {
        Real cert = st.c0.logmag + weight;
        if (!(cert > log_stop)) break;
        if (i >= step_limit)
            throw ConvergenceError("paper_mode",
                "stage " + std::to_string(tr.n) + ": translation stop rule unmet after " +
                    std::to_string(i) + " steps");
        LogComplex u0 = lc_div(lc_neg(st.c0), den);
        StepTrace step;
        step.n = tr.n;
        step.i = i;
        step.log10_eta = ln_to_log10(cert);
        step.log10_u0 = ln_to_log10(u0.logmag + weight);
        st.R_disc -= exp(u0.logmag + weight);
        step.disc_radius = to_double(st.R_disc);
        tr.steps.push_back(step);
        st.c0 = lc_mul(st.r, u0);
        ++i;
    }
    return i;
}

// winding + residue + Newton for the model map g(t) = c + t, whose derivative
// is the closed form g' = 1; every value is carried in log space
LogComplex toy_find_zero(const LogComplex& c, const LogComplex& center, const Real& log_radius,
                         int S, const std::string& where) {
    std::vector<LogComplex> ts(static_cast<std::size_t>(S));
    std::vector<LogComplex> vs(static_cast<std::size_t>(S));
    for (int j = 0; j < S; ++j) {
        std::size_t k = static_cast<std::size_t>(j);
        Complex dir = std::polar(1.0, two_pi_d * j / S);
        ts[k] = lc_add(center, LogComplex(log_radius, dir));
        vs[k] = lc_add(c, ts[k]);
        if (lc_is_zero(vs[k]))
            throw WindingError("paper_mode",
                where + ": parameter map vanishes on the sampled circle", 0);
    }
    double total = 0;
    for (int j = 0; j < S; ++j)
        total += std::arg(vs[static_cast<std::size_t>((j + 1) % S)].phase /
                          vs[static_cast<std::size_t>(j)].phase);
    long long winding = std::llround(total / two_pi_d);
    if (winding == 0)
        throw WindingError("paper_mode",
            where + ": winding-zero: no zero of the parameter map inside the circle", winding);
    if (winding != 1)
        throw WindingError("paper_mode",
            where + ": winding-many: winding number " + std::to_string(winding) +
                "; the zero is not simple",
            winding);
    // residue: mean_j t_j (r e^{2 pi i s_j}) / g_j
    LogComplex acc = lc_zero();
    for (int j = 0; j < S; ++j) {
        std::size_t k = static_cast<std::size_t>(j);
        Complex dir = std::polar(1.0, two_pi_d * j / S);
        acc = lc_add(acc, lc_div(lc_mul(ts[k], LogComplex(log_radius, dir)), vs[k]));
    }
    LogComplex zero = lc_scale(acc, 1.0 / S);
    Real tol = log_radius + std::log(1e-12);
    bool settled = false;
    for (int it = 0; it < 60; ++it) {
        LogComplex gx = lc_add(c, zero);
        if (lc_is_zero(gx) || gx.logmag <= tol) {
            settled = true;
            break;
        }
        zero = lc_add(zero, lc_neg(gx));
    }
    if (!settled)
        throw ConvergenceError("paper_mode", where + ": zero refinement stalled");
    return zero;
}

int trunc_of(int n) { return n >= 30 ? (1 << 30) : (1 << n); }

} // namespace

LogComplex lc_zero() { return LogComplex(); }

bool lc_is_zero(const LogComplex& a) { return a.logmag <= zero_threshold; }

LogComplex lc_make_log10(double log10_mag, Complex phase) {
    double a = std::abs(phase);
    if (!(a > 0))
        throw DomainViolation("paper_mode", "domain", "log-space scalar: phase must be nonzero");
    return LogComplex(Real(log10_mag) * log(Real(10)), phase / a);
}

LogComplex lc_from(Complex z) {
    double a = std::abs(z);
    if (!(a > 0)) return lc_zero();
    return LogComplex(Real(std::log(a)), z / a);
}

LogComplex lc_mul(const LogComplex& a, const LogComplex& b) {
    if (lc_is_zero(a) || lc_is_zero(b)) return lc_zero();
    Complex p = a.phase * b.phase;
    return LogComplex(a.logmag + b.logmag, p / std::abs(p));
}

LogComplex lc_div(const LogComplex& a, const LogComplex& b) {
    if (lc_is_zero(b))
        throw DomainViolation("paper_mode", "domain", "log-space scalar: division by zero");
    if (lc_is_zero(a)) return lc_zero();
    Complex p = a.phase / b.phase;
    return LogComplex(a.logmag - b.logmag, p / std::abs(p));
}

LogComplex lc_neg(const LogComplex& a) {
    if (lc_is_zero(a)) return lc_zero();
    return LogComplex(a.logmag, -a.phase);
}

LogComplex lc_add(const LogComplex& a, const LogComplex& b) {
    if (lc_is_zero(a)) return b;
    if (lc_is_zero(b)) return a;
    const LogComplex& big = a.logmag >= b.logmag ? a : b;
    const LogComplex& small = a.logmag >= b.logmag ? b : a;
    Real dl = small.logmag - big.logmag;
    double ratio_mag = dl < -745 ? 0.0 : std::exp(to_double(dl));
    Complex one_plus = Complex(1, 0) + ratio_mag * (small.phase / big.phase);
    double m = std::abs(one_plus);
    if (!(m > 0)) return lc_zero();
    return LogComplex(big.logmag + std::log(m), big.phase * (one_plus / m));
}

LogComplex lc_scale(const LogComplex& a, double c) {
    if (!(c > 0))
        throw DomainViolation("paper_mode", "domain", "log-space scalar: scale must be positive");
    if (lc_is_zero(a)) return lc_zero();
    return LogComplex(a.logmag + std::log(c), a.phase);
}

double lc_log10(const LogComplex& a) {
    if (lc_is_zero(a)) return log10_floor;
    return ln_to_log10(a.logmag);
}

Complex lc_approx(const LogComplex& a) {
    if (lc_is_zero(a)) return {0, 0};
    return std::exp(to_double(a.logmag)) * a.phase;
}

ToyPlan plan_paper_toy(const Real& alpha, const Real& beta, const ToyConfig& config) {
    ContinuedFraction cf = cf_expand(alpha, 64);
    KamSchedule sched = build_schedule(cf, beta, config.aleph, config.n_max);
    int n_star = choose_n_star(sched, config.delta);
    ToyPlan plan;
    plan.n_star = n_star;
    plan.log_l_nstar = sched.log_l[static_cast<std::size_t>(n_star)];
    plan.log_w_nstar = sched.log_w[static_cast<std::size_t>(n_star)];
    plan.log_eps_bar = log(config.delta) + plan.log_l_nstar + plan.log_w_nstar - log(Real(24));
    return plan;
}

ToyResult run_paper_toy(const ToyFamily& family, const ToyConfig& config) {
    if (!(config.epsilon > 0)) throw ConfigError("paper_mode", "epsilon must be positive");
    if (!(config.delta > 0) || !(config.aleph > 1))
        throw ConfigError("paper_mode", "need delta > 0 and aleph > 1");
    if (!(config.L > 1) || !(config.M > 0) || !(config.T > 0))
        throw ConfigError("paper_mode", "constants out of range: need L > 1, M > 0, T > 0");
    if (config.main_stages < 1 || config.step_limit < 1 || config.circle_samples < 8 ||
        config.n_max < 2)
        throw ConfigError("paper_mode", "stage counts out of range");
    if (family.mode < 1) throw ConfigError("paper_mode", "the model mode must be >= 1");
    if (lc_is_zero(family.rho1_base))
        throw ConfigError("paper_mode",
            "the multiplier coefficient must be nonzero: the centering step needs a "
            "nondegenerate zero to locate");
    if (auto k = is_rational_pair(family.alpha, family.beta, 4096, Real("1e-12")))
        throw RationalPair("paper_mode",
            "the fiber rotation sits on the base orbit: ||k alpha - beta|| < 1e-12 at k = " +
                std::to_string(*k),
            *k);

    ContinuedFraction cf = cf_expand(family.alpha, 64);
    KamSchedule sched = build_schedule(cf, family.beta, config.aleph, config.n_max);
    int n_star = choose_n_star(sched, config.delta);

    ToyResult res;
    res.n_star = n_star;
    if (static_cast<long long>(family.mode) > static_cast<long long>(trunc_of(n_star)))
        throw ConfigError("paper_mode",
            "the model mode " + std::to_string(family.mode) +
                " exceeds the first truncation 2^" + std::to_string(n_star));

    auto logw = [&sched](int n) { return sched.log_w[static_cast<std::size_t>(n)]; };
    auto logl = [&sched](int n) { return sched.log_l[static_cast<std::size_t>(n)]; };
    auto strip = [&sched](int n) { return sched.delta_n[static_cast<std::size_t>(n)]; };

    Real log_eps = log(config.epsilon);
    Real log_eps_bar = log(config.delta) + logl(n_star) + logw(n_star) - log(Real(24));
    res.log10_eps = ln_to_log10(log_eps);
    res.log10_eps_bar = ln_to_log10(log_eps_bar);
    if (log_eps > log_eps_bar)
        throw ConfigError("paper_mode",
            "epsilon above the admissibility threshold: log10 epsilon = " +
                std::to_string(res.log10_eps) + " but log10 eps_bar = " +
                std::to_string(res.log10_eps_bar) + "; shrink epsilon");

    // largest n whose scheduled room still holds the scaled family size,
    // capped so every main stage keeps schedule rows
    int n_cap = config.n_max - config.main_stages;
    if (n_star > n_cap)
        throw ConfigError("paper_mode", "n_max too small for the requested main stages");
    Real scaled = log_eps - logw(n_star);
    int n_bar = n_star;
    while (n_bar + 1 <= n_cap &&
           scaled <= log(config.delta) - log(Real(24)) + logl(n_bar + 1))
        ++n_bar;
    res.n_bar = n_bar;

    // strict size hypotheses on the family strip
    Real weight_family = 2 * pi_hp() * config.delta * family.mode;
    if (family.rho0_coeff.logmag + weight_family > log_eps)
        throw ConfigError("paper_mode",
            "hypothesis rho0-size: certified bound on the family strip exceeds epsilon");
    if (family.rho1_base.logmag > log_eps)
        throw ConfigError("paper_mode",
            "hypothesis rho1-size: certified bound on the family strip exceeds epsilon");
    // the second fiber derivative and both coupling measures vanish for the
    // model family, and the canonical coupling has transversality derivative
    // exactly one: inside (1/L, L) for every L > 1

    PairDivisorTable table(cf, family.beta);
    BigInt two_n(1);
    for (int i = 0; i < n_star; ++i) two_n *= 2;
    Real gamma_star = table.at(two_n).gamma;
    for (int n = n_star; n <= n_bar; ++n) {
        BigInt big(1);
        for (int i = 0; i < n; ++i) big *= 2;
        Real logW = log(Real(config.M)) + n * log(Real(2)) + log(table.at(big).gamma);
        res.log10_W.push_back(ln_to_log10(logW));
    }
    PrepConstants pc = compute_prep_constants(config.epsilon, config.L, config.M, config.T,
                                              config.delta, gamma_star, n_star, logw(n_star));
    res.log10_R_eps = ln_to_log10(log(pc.R_eps));
    res.log10_K_R = ln_to_log10(log(pc.K_R));

    Complex lambda_c = std::polar(1.0, two_pi_d * to_double(frac_part(family.beta)));
    LogComplex lambda_lc(Real(0), lambda_c);
    LogComplex den = twisted_den(family.alpha, family.beta, lambda_c, family.mode);

    ToyState st{family.rho0_coeff, family.rho1_base, Real(1)};
    LogComplex t_center = lc_zero();

    // preparation stages: translation loop under the epsilon-scaled stop rule
    for (int n = n_star; n < n_bar; ++n) {
        StageTrace tr;
        tr.n = n;
        tr.trunc = trunc_of(n);
        Real dn = strip(n);
        Real dnext = strip(n + 1);
        tr.strip_in = to_double(dn);
        tr.strip_out = to_double(dnext);
        Real w_mode = 2 * pi_hp() * dn * family.mode;
        tr.log10_rho0_in = ln_to_log10(st.c0.logmag + w_mode);
        Real log_stop = log_eps + logw(n + 1) - log(Real(2)) - log(config.aleph) - logw(n_star);
        tr.log10_eta_stop = ln_to_log10(log_stop);
        tr.i_n = toy_translation_loop(st, family.mode, den, dn, log_stop, config.step_limit, tr);
        tr.log10_rho0_out = ln_to_log10(st.c0.logmag + 2 * pi_hp() * dnext * family.mode);
        tr.log10_rho1_out = lc_log10(st.r);
        tr.log10_drho1_out = log10_floor; // constant multiplier coefficient
        tr.log10_u1_dev = log10_floor;    // no multiplier step during preparation
        tr.log10_w_next = ln_to_log10(logw(n + 1));
        tr.log10_l_next = ln_to_log10(logl(n + 1));
        tr.disc_radius_end = to_double(st.R_disc);
        tr.t_center = lc_approx(t_center);
        tr.cert_rho0_ok = true; // the loop exit condition is the certificate
        tr.cert_drho1_ok = true;
        tr.cert_radius_ok = st.R_disc >= Real(3) / 8;
        if (!tr.cert_radius_ok)
            throw StageAssertion("paper_mode",
                "stage " + std::to_string(n) + ": fiber disc radius fell under 3/8");
        res.prep_stages.push_back(tr);
    }

    // initial parameter centering on the certified radius
    t_center = toy_find_zero(family.rho1_base, lc_zero(), log(pc.R_eps),
                             config.circle_samples, "preparation");
    res.t_star = t_center;
    st.r = lc_add(family.rho1_base, t_center);
    Real log_p = log(Real(2400)) + log_eps - logw(n_star) - log(config.delta);
    res.prep_radius_log10 = ln_to_log10(log_p);

    for (int k = 0; k < config.main_stages; ++k) {
        int n = n_bar + k;
        StageTrace tr;
        tr.n = n;
        tr.trunc = trunc_of(n);
        Real dn = strip(n);
        Real dnext = strip(n + 1);
        tr.strip_in = to_double(dn);
        tr.strip_out = to_double(dnext);
        Real w_mode = 2 * pi_hp() * dn * family.mode;
        tr.log10_rho0_in = ln_to_log10(st.c0.logmag + w_mode);
        Real log_stop = logw(n + 1) - log(Real(4));
        tr.log10_eta_stop = ln_to_log10(log_stop);
        tr.i_n = toy_translation_loop(st, family.mode, den, dn, log_stop, config.step_limit, tr);

        // multiplier split: lambda_n = lambda + rho1 exactly for a constant
        // coefficient; the conjugacy is trivial and the drift stays in rho1
        LogComplex lam_n = lc_add(lambda_lc, st.r);
        tr.lambda_ratio = lc_approx(lc_div(lam_n, lambda_lc));
        tr.log10_u1_dev = log10_floor;

        // scheduled certificates at the narrowed strip
        Real cert_rho0 = st.c0.logmag + 2 * pi_hp() * dnext * family.mode;
        tr.log10_rho0_out = ln_to_log10(cert_rho0);
        tr.log10_w_next = ln_to_log10(logw(n + 1));
        tr.log10_l_next = ln_to_log10(logl(n + 1));
        tr.cert_rho0_ok = cert_rho0 <= logw(n + 1);
        if (!tr.cert_rho0_ok)
            throw StageAssertion("paper_mode",
                "stage " + std::to_string(n) +
                    ": certified curve size exceeds the scheduled bound w_{n+1}");
        tr.cert_drho1_ok = true; // constant coefficient: zero theta-derivative
        tr.log10_drho1_out = log10_floor;
        tr.cert_radius_ok = st.R_disc >= Real(3) / 8;
        if (!tr.cert_radius_ok)
            throw StageAssertion("paper_mode",
                "stage " + std::to_string(n) + ": fiber disc radius fell under 3/8");
        tr.disc_radius_end = to_double(st.R_disc);

        // parameter correction on the scheduled circle, then the nesting check
        Real log_rc = log(Real(100) / 99) + log(Real(3)) + logl(n);
        LogComplex t_new = toy_find_zero(family.rho1_base, t_center, log_rc,
                                         config.circle_samples, "stage " + std::to_string(n));
        LogComplex dt = lc_add(t_new, lc_neg(t_center));
        Real move = lc_is_zero(dt) ? Real(0) : exp(dt.logmag);
        Real log_p_next = log(Real(100)) + logl(n + 1);
        tr.nesting_ok = move + exp(log_p_next) <= exp(log_p);
        if (!tr.nesting_ok)
            throw StageAssertion("paper_mode",
                "stage " + std::to_string(n) + ": parameter discs do not nest");
        tr.t_move = to_double(move);
        t_center = t_new;
        st.r = lc_add(family.rho1_base, t_center);
        log_p = log_p_next;
        tr.p_radius = to_double(exp(log_p));
        tr.t_center = lc_approx(t_center);
        tr.log10_rho1_out = lc_log10(st.r);
        tr.measured_dg = 1.0; // closed-form derivative of the canonical coupling
        res.main_stages.push_back(tr);
    }

    res.t_bar = t_center;
    res.all_certificates_pass = true;
    return res;
}

} // namespace fhkam
