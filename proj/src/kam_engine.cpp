#include "fhkam/kam_engine.hpp"

#include "fhkam/cohomology.hpp"
#include "fhkam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace fhkam {

namespace {

constexpr double two_pi_d = 6.283185307179586476925286766559;
constexpr double log10_floor = -400; // decimal log reported for an exact zero

double log10_pos(double x) { return x > 0 ? std::log10(x) : log10_floor; }

double log10_real(const Real& x) {
    if (!(x > 0)) return log10_floor;
    return to_double(log(x)) / std::log(10.0);
}

double mod1_distance(double a, double b) {
    double d = std::fabs(a - b);
    d -= std::floor(d);
    return std::min(d, 1 - d);
}

// real-line certified norm: the strip-weighted bound at width zero.  Stage
// stop rules compare against this, not the full-strip bound, so coefficient
// noise near the trim floor is never amplified by the strip weights.
double realline(const StripFunction& f) { return to_double(norm_bound(f, Real(0))); }

int trunc_for(const EngineConfig& config, int n) {
    long long t = n >= 30 ? (1LL << 30) : (1LL << n);
    return static_cast<int>(std::min<long long>(t, config.global_fourier_cap));
}

// Fourier cap of the working jet: the family's own support plus the order
// where analytic decay on the family strip reaches the trim floor, plus
// divisor-amplification headroom.  Content beyond it is below the floor.
int working_cap(const ParamFamily& family, const EngineConfig& config) {
    int base_order = std::max(family.base.rho0.order, family.base.rho1.order);
    for (const StripFunction& f : family.base.rho_taylor)
        base_order = std::max(base_order, f.order);
    for (const StripFunction& f : family.rho0_poly) base_order = std::max(base_order, f.order);
    for (const StripFunction& f : family.rho1_poly) base_order = std::max(base_order, f.order);
    double df = std::max(to_double(family.base.strip), 1e-3);
    int cap = base_order + static_cast<int>(std::ceil(6.0 / df)) + 48;
    return std::min(std::max(cap, 64), config.global_fourier_cap);
}

// initial Cauchy step: the working strip is three quarters of the family strip
Real working_strip(const ParamFamily& family, const EngineConfig& config) {
    Real d = config.delta < family.base.strip ? config.delta : family.base.strip;
    return 3 * d / 4;
}

void trim_jet(FiberedJet& jet, double floor) {
    jet.rho0 = trim(jet.rho0, floor);
    jet.rho1 = trim(jet.rho1, floor);
    for (StripFunction& r : jet.rho_taylor) r = trim(r, floor);
}

void retag_strip(FiberedJet& jet, const Real& s) {
    jet.strip = s;
    jet.rho0.strip = s;
    jet.rho1.strip = s;
    for (StripFunction& r : jet.rho_taylor) r.strip = s;
}

FiberedJet working_jet(const ParamFamily& family, const EngineConfig& config, Complex t) {
    FiberedJet jet = family_jet(family, t);
    jet = make_jet(jet.alpha, jet.beta, jet.rho0, jet.rho1, jet.rho_taylor,
                   working_strip(family, config), jet.disc_radius,
                   working_cap(family, config), config.taylor_cap);
    trim_jet(jet, config.trim_floor);
    return jet;
}

// one twisted translation step at truncation `trunc`: solve
// lambda u0 - u0(. + alpha) = -rho0|_trunc and conjugate by (theta, z + u0)
StripFunction translation_step(FiberedJet& jet, int trunc, double floor) {
    StripFunction p = truncate(jet.rho0, trunc);
    StripFunction u0 = trim(solve_twisted(scale(p, Complex(-1, 0)), jet.alpha, jet.beta), floor);
    jet = conjugate_translation(jet, u0);
    trim_jet(jet, floor);
    return u0;
}

// one multiplier step at truncation `trunc`: with w = log(1 + rho1 / lambda),
// solve v - v(. + alpha) = mean(w|_trunc) - w|_trunc and conjugate by
// (theta, e^v z); the drift e^{mean} stays in rho1 (lambda itself is pinned
// to the circle point, the parameter correction removes the drift instead)
StripFunction multiplier_step(FiberedJet& jet, int trunc, double floor, Complex& ratio) {
    Complex lam = jet.lambda;
    StripFunction w = log1p_series(scale(jet.rho1, Complex(1, 0) / lam), jet.fourier_cap);
    StripFunction wt = truncate(w, trunc);
    Complex mu = mean(wt);
    StripFunction rhs = scale(subtract(wt, constant_function(mu, wt.strip)), Complex(-1, 0));
    StripFunction v = trim(solve_untwisted(rhs, jet.alpha), floor);
    StripFunction u1 = trim(exp_series(v, jet.fourier_cap), floor);
    jet = conjugate_linear(jet, u1, lam);
    trim_jet(jet, floor);
    ratio = std::exp(mu);
    return u1;
}

// replay one recorded stage; optionally composes the affine conjugacy
// (A <- A + B u0, B <- B u1, accumulated without trimming so the composition
// is exact at cap arithmetic) and collects the multiplier drifts
void apply_plan(const EngineConfig& config, FiberedJet& jet, const StagePlan& plan,
                AffineConjugacy* acc, std::vector<Complex>* ratios) {
    if (plan.trunc < 1 || plan.i_n < 0 || !(plan.strip_out > 0))
        throw DomainViolation("kam_engine", "log-mismatch",
            "replay: stage plan fields out of range at stage " + std::to_string(plan.n));
    for (int i = 0; i < plan.i_n; ++i) {
        StripFunction u0 = translation_step(jet, plan.trunc, config.trim_floor);
        if (acc) acc->u0 = add(acc->u0, multiply(acc->u1, u0, jet.fourier_cap));
    }
    if (plan.linear_step) {
        Complex ratio(1, 0);
        StripFunction u1 = multiplier_step(jet, plan.trunc, config.trim_floor, ratio);
        if (acc) acc->u1 = multiply(acc->u1, u1, jet.fourier_cap);
        if (ratios) ratios->push_back(ratio);
    }
    Real s = plan.strip_out < jet.strip ? plan.strip_out : jet.strip;
    retag_strip(jet, s);
}

// evaluate g concurrently at the circle points; exceptions are captured per
// index and the first one in index order is rethrown, so failures are
// deterministic regardless of scheduling
std::vector<Complex> map_circle(const std::function<Complex(Complex)>& g,
                                const std::vector<Complex>& pts) {
    const int S = static_cast<int>(pts.size());
    std::vector<Complex> vals(pts.size());
    std::vector<std::exception_ptr> errs(pts.size());
    #pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < S; ++j) {
        sync_thread_precision();
        std::size_t k = static_cast<std::size_t>(j);
        try {
            vals[k] = g(pts[k]);
        } catch (...) {
            errs[k] = std::current_exception();
        }
    }
    for (const std::exception_ptr& e : errs)
        if (e) std::rethrow_exception(e);
    return vals;
}

// d/dt of the circle series sum_k a_k ((t - center) / radius)^k; the
// negative modes of an analytic g are at noise level and are ignored
Complex series_derivative(const StripFunction& G, Complex center, double radius, Complex x) {
    Complex dz = (x - center) / radius;
    Complex acc(0, 0);
    for (int k = G.order; k >= 1; --k) acc = acc * dz + static_cast<double>(k) * G.coeff(k);
    return acc / radius;
}

// winding-zero grows the circle, winding-many shrinks it, a few times over
ZeroHit locate_with_retry(const std::function<Complex(Complex)>& g, Complex center,
                          double r0, int samples, double& r_used) {
    double r = r0;
    for (int attempt = 0;; ++attempt) {
        try {
            ZeroHit hit = find_parameter_zero(g, center, r, samples);
            r_used = r;
            return hit;
        } catch (const WindingError& e) {
            if (attempt >= 8) throw;
            r = e.winding() == 0 ? r * 5 : r / 5;
        }
    }
}

// certified |d^2_z rho| on the current disc: sum_k k (k-1) ||rho_k|| R^{k-2}
double d2z_bound(const FiberedJet& jet) {
    Real acc = 0;
    Real rp = 1;
    for (std::size_t i = 0; i < jet.rho_taylor.size(); ++i) {
        int k = static_cast<int>(i) + 2;
        if (i > 0) rp *= jet.disc_radius;
        acc += k * (k - 1) * norm_bound(jet.rho_taylor[i], jet.strip) * rp;
    }
    return to_double(acc);
}

double slack_total(const FiberedJet& jet) {
    double s = jet.rho0.slack + jet.rho1.slack;
    for (const StripFunction& r : jet.rho_taylor) s += r.slack;
    return s;
}

KamResult finalize_run(const ParamFamily& family, const EngineConfig& config,
                       const EngineState& st) {
    ReplayOutput out = replay(family, config, st.plans, st.plans.size(), st.t_center, true);
    FiberedJet target = family_jet(family, st.t_center);
    KamResult res;
    res.t_bar = st.t_center;
    res.curve = InvariantCurve{out.conj.u0, st.t_center, out.conj.u0.strip};
    res.u1_product = out.conj.u1;
    res.final_jet = out.jet;
    res.residual = invariance_residual(target, out.conj.u0, config.quad_samples);
    res.rotation = fibered_rotation_number(target, out.conj.u0, config.quad_samples);
    res.defect = indifference_defect(target, out.conj.u0, config.quad_samples);
    res.rotation_error = mod1_distance(res.rotation, to_double(frac_part(family.base.beta)));
    double sup = 0;
    for (const Complex& u : sample_grid(out.conj.u0, config.quad_samples))
        sup = std::max(sup, std::abs(u));
    res.sup_u = sup;
    Complex prod(1, 0);
    for (const Complex& r : out.lambda_ratios) prod *= r;
    res.lambda_drift = std::abs(prod - Complex(1, 0));
    StripFunction one = constant_function(Complex(1, 0), out.conj.u1.strip);
    res.u1_degree_zero = norm_bound(subtract(out.conj.u1, one), Real(0)) < 1;
    res.state = st;
    return res;
}

KamResult drive(const ParamFamily& family, const EngineConfig& config, EngineState st,
                const StageCallback& on_stage) {
    const double mean_tol = std::max(1e-3 * config.target_residual, 1e-13);
    for (int n = st.next_n;; ++n) {
        if (n > config.n_max)
            throw ConvergenceError("kam_engine",
                "stage cap n_max = " + std::to_string(config.n_max) +
                " reached before the target residual");
        run_stage(family, config, st, n);
        if (on_stage) on_stage(st);
        double rho0n = realline(st.jet.rho0);
        double mu = std::abs(mean(st.jet.rho1));
        if (rho0n <= 0.4 * config.target_residual && mu <= mean_tol) {
            KamResult res = finalize_run(family, config, st);
            if (res.residual <= config.target_residual) return res;
        }
    }
}

} // namespace

ParamFamily linear_family(FiberedJet base) {
    ParamFamily fam;
    fam.rho1_poly.push_back(constant_function(Complex(1, 0), base.strip));
    fam.base = std::move(base);
    return fam;
}

FiberedJet family_jet(const ParamFamily& family, Complex t) {
    StripFunction r0 = family.base.rho0;
    StripFunction r1 = family.base.rho1;
    std::size_t terms = std::max(family.rho0_poly.size(), family.rho1_poly.size());
    Complex tp(1, 0);
    for (std::size_t j = 0; j < terms; ++j) {
        tp *= t;
        if (j < family.rho0_poly.size()) r0 = add(r0, scale(family.rho0_poly[j], tp));
        if (j < family.rho1_poly.size()) r1 = add(r1, scale(family.rho1_poly[j], tp));
    }
    return make_jet(family.base.alpha, family.base.beta, std::move(r0), std::move(r1),
                    family.base.rho_taylor, family.base.strip, family.base.disc_radius,
                    family.base.fourier_cap, family.base.taylor_cap);
}

Complex family_rho1_mean(const ParamFamily& family, Complex t) {
    Complex acc = mean(family.base.rho1);
    Complex tp(1, 0);
    for (const StripFunction& f : family.rho1_poly) {
        tp *= t;
        acc += tp * mean(f);
    }
    return acc;
}

Complex transversality_derivative(const ParamFamily& family, Complex t) {
    Complex acc(0, 0);
    Complex tp(1, 0);
    for (std::size_t j = 0; j < family.rho1_poly.size(); ++j) {
        if (j > 0) tp *= t;
        acc += static_cast<double>(j + 1) * tp * mean(family.rho1_poly[j]);
    }
    return acc;
}

Complex transversality_second(const ParamFamily& family, Complex t) {
    Complex acc(0, 0);
    Complex tp(1, 0);
    for (std::size_t j = 1; j < family.rho1_poly.size(); ++j) {
        if (j > 1) tp *= t;
        acc += static_cast<double>((j + 1) * j) * tp * mean(family.rho1_poly[j]);
    }
    return acc;
}

PrepConstants compute_prep_constants(const Real& epsilon, double L, double M, double T,
                                     const Real& delta, const Real& gamma_pair_nstar,
                                     int n_star, const Real& log_w_nstar) {
    if (!(epsilon > 0)) throw ConfigError("kam_engine", "epsilon must be positive");
    if (!(L > 1)) throw ConfigError("kam_engine", "the transversality window needs L > 1");
    if (!(M > 0) || !(T > 0)) throw ConfigError("kam_engine", "M and T must be positive");
    if (!(delta > 0)) throw ConfigError("kam_engine", "delta must be positive");
    PrepConstants pc;
    pc.W_nstar = M * pow(Real(2), n_star) * gamma_pair_nstar;
    Real one_plus = 1 + 4 * pc.W_nstar;
    Real y = 2 * T * epsilon * one_plus * L * L;
    if (y > 1)
        throw ConfigError("kam_engine",
            "zero-search radius undefined: the discriminant 1/L^2 - 2 T eps (1 + 4 W) "
            "is negative; shrink epsilon or the divisor growth");
    // (1/L - sqrt(1/L^2 - 2 T eps (1 + 4 W))) / T evaluated in the
    // cancellation-free form y / (L T (1 + sqrt(1 - y)))
    pc.R_eps = y / (L * T * (1 + sqrt(Real(1 - y))));
    pc.K_R = 2 * L * one_plus + 96000 * L * pc.W_nstar + 2400 * exp(-log_w_nstar) / delta;
    return pc;
}

HypothesisReport verify_hypotheses(const ParamFamily& family, const EngineConfig& config) {
    if (auto k = is_rational_pair(family.base.alpha, family.base.beta, 4096, Real("1e-12")))
        throw RationalPair("kam_engine",
            "the fiber rotation sits on the base orbit: ||k alpha - beta|| < 1e-12 at k = " +
                std::to_string(*k) + ", so the twisted denominators degenerate",
            *k);
    HypothesisReport rep;
    Real dd = family.base.strip < config.delta ? family.base.strip : config.delta;
    FiberedJet jet0 = family_jet(family, Complex(0, 0));
    auto push = [&rep](const std::string& name, double lv, double lb, bool pass) {
        rep.items.push_back({name, lv, lb, pass});
        rep.all_pass = rep.all_pass && pass;
    };
    double leps = log10_real(config.epsilon);
    Real n0 = norm_bound(jet0.rho0, dd);
    push("rho0-size", log10_real(n0), leps, n0 <= config.epsilon);
    Real n1 = norm_bound(jet0.rho1, dd);
    push("rho1-size", log10_real(n1), leps, n1 <= config.epsilon);
    Real d2 = 0;
    Real rp = 1;
    for (std::size_t i = 0; i < jet0.rho_taylor.size(); ++i) {
        int k = static_cast<int>(i) + 2;
        if (i > 0) rp *= jet0.disc_radius;
        d2 += k * (k - 1) * norm_bound(jet0.rho_taylor[i], dd) * rp;
    }
    push("d2z-size", log10_real(d2), log10_pos(config.M), d2 <= config.M);
    Real coup = family.rho1_poly.size() >= 2 ? Real(2 * norm_bound(family.rho1_poly[1], dd))
                                             : Real(0);
    push("coupling-size", log10_real(coup), log10_pos(config.T), coup <= config.T);
    rep.delta0 = transversality_derivative(family, Complex(0, 0));
    double a0 = std::abs(rep.delta0);
    rep.transversal = a0 > 1.0 / config.L && a0 < config.L;
    push("transversality", log10_pos(a0), log10_pos(config.L), rep.transversal);
    return rep;
}

ZeroHit find_parameter_zero(const std::function<Complex(Complex)>& g, Complex center,
                            double radius, int samples) {
    if (!(radius > 0) || samples < 8)
        throw DomainViolation("kam_engine", "domain",
            "zero finder: radius must be positive and samples >= 8");
    const int S = samples;
    std::vector<Complex> pts(static_cast<std::size_t>(S));
    for (int j = 0; j < S; ++j)
        pts[static_cast<std::size_t>(j)] = center + std::polar(radius, two_pi_d * j / S);
    std::vector<Complex> vals = map_circle(g, pts);
    double minmod = std::numeric_limits<double>::infinity();
    for (const Complex& v : vals) minmod = std::min(minmod, std::abs(v));
    if (!(minmod > 0))
        throw WindingError("kam_engine",
            "parameter map vanishes on the sampled circle; resize it", 0);
    double total = 0;
    for (int j = 0; j < S; ++j)
        total += std::arg(vals[static_cast<std::size_t>((j + 1) % S)] /
                          vals[static_cast<std::size_t>(j)]);
    long long winding = std::llround(total / two_pi_d);
    if (winding == 0)
        throw WindingError("kam_engine",
            "winding-zero: the parameter map has no zero inside the circle", winding);
    if (winding != 1)
        throw WindingError("kam_engine",
            "winding-many: winding number " + std::to_string(winding) +
                "; the zero inside the circle is not simple",
            winding);

    // Fourier series of g along the circle; the zero comes out of the
    // discrete residue (1 / 2 pi i) mean_j t_j G'(s_j) / G(s_j)
    int order = (S - 1) / 2;
    StripFunction G = transform(vals, order, Real(1));
    std::vector<Complex> gp = sample_grid(derivative(G), S);
    Complex acc(0, 0);
    for (int j = 0; j < S; ++j) {
        std::size_t k = static_cast<std::size_t>(j);
        acc += pts[k] * gp[k] / vals[k];
    }
    Complex zero = acc / (Complex(0, two_pi_d) * static_cast<double>(S));

    // Newton floor: maps evaluated through the stage pipeline carry an
    // absolute noise of grid-composition rounding, so the steps stop
    // contracting once the iterate enters the noise basin.  Accept either the
    // strict tolerance or a stagnating step that is already deep inside the
    // circle; a step sequence that keeps halving reaches the tolerance anyway.
    const double tol = 1e-12 * radius;
    Complex x = zero;
    Complex dgx(0, 0);
    bool settled = false;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        dgx = series_derivative(G, center, radius, x);
        if (!(std::abs(dgx) > 0))
            throw ConvergenceError("kam_engine",
                "zero refinement: the series derivative vanished at the iterate");
        Complex step = g(x) / dgx;
        x -= step;
        double s = std::abs(step);
        if (s <= tol || (it >= 2 && s >= 0.5 * prev && s <= 1e-3 * radius)) {
            settled = true;
            break;
        }
        prev = s;
    }
    if (!settled)
        throw ConvergenceError("kam_engine",
            "zero refinement did not reach 1e-12 of the circle radius within 60 steps");
    return {x, dgx, minmod};
}

ReplayOutput replay(const ParamFamily& family, const EngineConfig& config,
                    const std::vector<StagePlan>& plans, std::size_t upto, Complex t,
                    bool accumulate) {
    if (upto > plans.size())
        throw DomainViolation("kam_engine", "log-overrun",
            "replay: requested " + std::to_string(upto) + " stages, the log holds " +
                std::to_string(plans.size()));
    ReplayOutput out;
    out.jet = working_jet(family, config, t);
    AffineConjugacy* acc = nullptr;
    std::vector<Complex>* ratios = nullptr;
    if (accumulate) {
        out.conj.u0 = constant_function(Complex(0, 0), out.jet.strip);
        out.conj.u1 = constant_function(Complex(1, 0), out.jet.strip);
        acc = &out.conj;
        ratios = &out.lambda_ratios;
    }
    for (std::size_t s = 0; s < upto; ++s)
        apply_plan(config, out.jet, plans[s], acc, ratios);
    if (accumulate) {
        out.conj.u0.strip = out.jet.strip;
        out.conj.u1.strip = out.jet.strip;
    }
    return out;
}

EngineState prepare(const ParamFamily& family, const EngineConfig& config) {
    if (config.mode == EngineMode::paper_faithful)
        throw ConfigError("kam_engine",
            "the schedule-faithful mode runs on the log-space model family; call "
            "run_paper_toy on a model family instead of the adaptive engine");
    if (config.n_start < 1 || config.n_max < config.n_start)
        throw ConfigError("kam_engine", "stage range: need 1 <= n_start <= n_max");
    if (!(config.delta > 0)) throw ConfigError("kam_engine", "delta must be positive");
    if (!(config.L > 1)) throw ConfigError("kam_engine", "the transversality window needs L > 1");
    if (config.step_limit < 1 || config.circle_samples < 8)
        throw ConfigError("kam_engine", "step_limit and circle_samples out of range");

    EngineState st;
    st.prep.hypotheses = verify_hypotheses(family, config);
    st.prep.delta0 = st.prep.hypotheses.delta0;
    if (!st.prep.hypotheses.transversal)
        throw ConfigError("kam_engine",
            "transversality window violated: |d/dt int rho1| must lie in (1/L, L)");

    // report-only radius and budget constants from the divisor growth at the
    // first stage; an undefined radius does not refuse the adaptive run
    try {
        ContinuedFraction cf = cf_expand(family.base.alpha, 40);
        KamSchedule sched = build_schedule(cf, family.base.beta, config.aleph,
                                           config.n_start + 1);
        PairDivisorTable table(cf, family.base.beta);
        BigInt big_n(1);
        for (int i = 0; i < config.n_start; ++i) big_n *= 2;
        DivisorHit hit = table.at(big_n);
        PrepConstants pc = compute_prep_constants(
            config.epsilon, config.L, config.M, config.T, config.delta, hit.gamma,
            config.n_start, sched.log_w[static_cast<std::size_t>(config.n_start)]);
        st.prep.log10_R_eps = log10_real(pc.R_eps);
        st.prep.log10_K_R = log10_real(pc.K_R);
        st.prep.log10_W.push_back(log10_real(pc.W_nstar));
        st.prep.r_eps_defined = true;
    } catch (const Error&) {
        st.prep.r_eps_defined = false;
    }

    // initial centering: zero of the closed-form multiplier mean, certified
    // by winding number one on an adaptively sized circle
    auto g0 = [&family](Complex t) { return family_rho1_mean(family, t); };
    double gmag = std::abs(g0(Complex(0, 0)));
    double d0 = std::abs(st.prep.delta0);
    double r0 = std::max(2 * gmag / d0, 1e-9);
    double r_used = r0;
    ZeroHit hit = locate_with_retry(g0, Complex(0, 0), r0, config.circle_samples, r_used);
    st.prep.t_star = hit.zero;
    st.prep.zero_radius = r_used;
    st.prep.n_bar = config.n_start;
    st.t_center = hit.zero;
    // the disc all later centers must stay inside: the correction budget is
    // proportional to the family size over the transversality derivative
    st.p_radius = std::max(r_used, 10 * to_double(config.epsilon) / d0);
    st.next_n = config.n_start;
    st.jet = working_jet(family, config, st.t_center);
    st.jet_valid = true;
    return st;
}

StageTrace run_stage(const ParamFamily& family, const EngineConfig& config, EngineState& state,
                     int n) {
    if (!state.jet_valid) {
        state.jet = replay(family, config, state.plans, state.plans.size(), state.t_center).jet;
        state.jet_valid = true;
    }
    StageTrace tr;
    tr.n = n;
    tr.trunc = trunc_for(config, n);
    tr.strip_in = to_double(state.jet.strip);
    tr.log10_rho0_in = log10_pos(realline(state.jet.rho0));

    StagePlan plan;
    plan.n = n;
    plan.trunc = tr.trunc;
    plan.linear_step = true;
    plan.strip_out = state.jet.strip;

    // translation loop: two certified decades per stage or the target floor
    double eta0 = realline(state.jet.rho0);
    double stop = std::max(eta0 * 1e-2, config.target_residual / 10);
    tr.log10_eta_stop = log10_pos(stop);
    int i = 0;
    while (true) {
        double eta = realline(state.jet.rho0);
        if (eta <= stop) break;
        if (i >= config.step_limit)
            throw ConvergenceError("kam_engine",
                "stage " + std::to_string(n) + ": translation stop rule unmet after " +
                    std::to_string(i) + " steps");
        StripFunction u0 = translation_step(state.jet, plan.trunc, config.trim_floor);
        StepTrace step;
        step.n = n;
        step.i = i;
        step.log10_eta = log10_pos(eta);
        step.log10_u0 = log10_pos(realline(u0));
        step.disc_radius = to_double(state.jet.disc_radius);
        tr.steps.push_back(step);
        ++i;
    }
    plan.i_n = i;
    tr.i_n = i;

    Complex ratio(1, 0);
    StripFunction u1 = multiplier_step(state.jet, plan.trunc, config.trim_floor, ratio);
    tr.lambda_ratio = ratio;
    tr.log10_u1_dev =
        log10_pos(realline(subtract(u1, constant_function(Complex(1, 0), u1.strip))));

    Real s_out = plan.strip_out < state.jet.strip ? plan.strip_out : state.jet.strip;
    retag_strip(state.jet, s_out);
    tr.strip_out = to_double(state.jet.strip);
    tr.log10_rho0_out = log10_pos(realline(state.jet.rho0));
    tr.log10_rho1_out = log10_pos(realline(state.jet.rho1));
    tr.log10_drho1_out = log10_pos(realline(derivative(state.jet.rho1)));
    tr.measured_d2z = d2z_bound(state.jet);
    tr.disc_radius_end = to_double(state.jet.disc_radius);
    tr.slack = slack_total(state.jet);

    state.plans.push_back(plan);

    // parameter correction: zero of the stage-advanced multiplier mean,
    // evaluated by replaying the full log at circle points
    Complex g_here = mean(state.jet.rho1);
    Complex dprox = transversality_derivative(family, state.t_center);
    if (std::abs(dprox) == 0) dprox = state.prep.delta0;
    double prev_radius = state.p_radius;
    if (std::abs(g_here) <= 1e-15 && std::abs(dprox) > 0) {
        // mean already at grid accuracy: a proxy Newton step stands in for
        // the circle (the finder would accept the center immediately)
        Complex shift = -g_here / dprox;
        state.t_center += shift;
        tr.t_move = std::abs(shift);
        tr.measured_dg = std::abs(dprox);
        state.p_radius = std::max(std::min(prev_radius / 2, 1e-9),
                                  2 * std::abs(g_here) / std::abs(dprox));
    } else {
        auto g = [&family, &config, &state](Complex t) {
            return mean(replay(family, config, state.plans, state.plans.size(), t).jet.rho1);
        };
        double r0 = std::max(4 * std::abs(g_here) /
                                 std::max(std::abs(dprox), 1.0 / (2 * config.L)),
                             std::min(prev_radius / 4, 1e-9));
        double r_used = r0;
        ZeroHit hit = locate_with_retry(g, state.t_center, r0, config.circle_samples, r_used);
        tr.measured_dg = std::abs(hit.derivative);
        tr.t_move = std::abs(hit.zero - state.t_center);
        state.t_center = hit.zero;
        state.p_radius = r_used;
    }
    tr.t_center = state.t_center;
    tr.p_radius = state.p_radius;
    tr.nesting_ok = tr.t_move + state.p_radius <= prev_radius * (1 + 1e-9);

    // re-center the cached jet by replaying the whole log at the new center
    state.jet = replay(family, config, state.plans, state.plans.size(), state.t_center).jet;
    state.jet_valid = true;
    state.next_n = n + 1;
    state.traces.push_back(tr);
    return tr;
}

KamResult run(const ParamFamily& family, const EngineConfig& config,
              const StageCallback& on_stage) {
    EngineState st = prepare(family, config);
    if (on_stage) on_stage(st);
    return drive(family, config, std::move(st), on_stage);
}

KamResult resume(const ParamFamily& family, const EngineConfig& config, EngineState state,
                 const StageCallback& on_stage) {
    if (config.mode == EngineMode::paper_faithful)
        throw ConfigError("kam_engine",
            "the schedule-faithful mode runs on the log-space model family; call "
            "run_paper_toy on a model family instead of the adaptive engine");
    if (!state.jet_valid) {
        state.jet = replay(family, config, state.plans, state.plans.size(), state.t_center).jet;
        state.jet_valid = true;
    }
    return drive(family, config, std::move(state), on_stage);
}

} // namespace fhkam
