#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fhkam/errors.hpp"
#include "fhkam/kam_engine.hpp"
#include "fhkam/paper_mode.hpp"
#include "oracle_helpers.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

using namespace fhkam;

namespace {

bool contains(const std::string& hay, const char* needle) {
    return hay.find(needle) != std::string::npos;
}

// canonical test family: rho0 = eps cos(2 pi theta), rho1 = eps e(theta),
// quadratic fiber term, linear parameter coupling
ParamFamily two_mode_family(double eps) {
    Real alpha = oracle::golden();
    Real beta = alpha / 2;
    Real strip("0.1");
    StripFunction rho0(1, strip);
    rho0.coeff_ref(1) = Complex(eps / 2, 0);
    rho0.coeff_ref(-1) = Complex(eps / 2, 0);
    StripFunction rho1(1, strip);
    rho1.coeff_ref(1) = Complex(eps, 0);
    std::vector<StripFunction> taylor;
    StripFunction quad(0, strip);
    quad.coeff_ref(0) = Complex(1, 0);
    taylor.push_back(quad);
    return linear_family(make_jet(alpha, beta, rho0, rho1, taylor, strip, Real(1), 128, 6));
}

ToyFamily calibrated_toy_family(const Real& log_eps) {
    ToyFamily fam;
    fam.alpha = oracle::golden();
    fam.beta = fam.alpha / 2;
    fam.mode = 1;
    fam.rho0_coeff = LogComplex(log_eps - log(Real(10)), Complex(1, 0));
    fam.rho1_base = LogComplex(log_eps - log(Real(10)), Complex(0.8, 0.6));
    return fam;
}

} // namespace

TEST_CASE("parameter zero finder: closed forms and winding refusals") {
    Complex c(3e-5, -2e-5);
    ZeroHit hit = find_parameter_zero([c](Complex t) { return t - c; }, Complex(0, 0), 1e-4, 256);
    CHECK(std::abs(hit.zero - c) <= 1e-15);
    CHECK(std::abs(hit.derivative - Complex(1, 0)) <= 1e-9);
    CHECK(hit.min_on_circle > 0);

    bool threw = false;
    try {
        find_parameter_zero([c](Complex t) { return (t - c) * (t - c); }, Complex(0, 0), 1e-4,
                            256);
    } catch (const WindingError& e) {
        threw = true;
        CHECK(e.winding() == 2);
        CHECK(contains(e.what(), "winding-many"));
    }
    CHECK(threw);

    threw = false;
    try {
        find_parameter_zero([](Complex t) { return t - Complex(5, 0); }, Complex(0, 0), 1.0, 256);
    } catch (const WindingError& e) {
        threw = true;
        CHECK(e.winding() == 0);
        CHECK(contains(e.what(), "winding-zero"));
    }
    CHECK(threw);
}

TEST_CASE("family evaluation: linear coupling is exact") {
    ParamFamily fam = two_mode_family(1e-4);
    Complex t(2e-4, -1e-4);
    FiberedJet jet = family_jet(fam, t);
    CHECK(std::abs(jet.rho1.coeff(0) - (fam.base.rho1.coeff(0) + t)) <= 1e-18);
    CHECK(std::abs(jet.rho1.coeff(1) - fam.base.rho1.coeff(1)) <= 1e-18);
    CHECK(std::abs(jet.rho0.coeff(1) - fam.base.rho0.coeff(1)) <= 1e-18);
    CHECK(std::abs(family_rho1_mean(fam, t) - (mean(fam.base.rho1) + t)) <= 1e-18);
    CHECK(std::abs(transversality_derivative(fam, t) - Complex(1, 0)) <= 1e-15);
    CHECK(std::abs(transversality_second(fam, t)) <= 1e-15);
}

TEST_CASE("family evaluation: derivatives match central differences") {
    ParamFamily fam = two_mode_family(1e-4);
    StripFunction curved(1, Real("0.1"));
    curved.coeff_ref(0) = Complex(0.3, 0.1);
    curved.coeff_ref(1) = Complex(0.05, 0);
    fam.rho1_poly.push_back(curved); // coefficient of t^2
    Complex t(1e-3, 5e-4);
    double h = 1e-4;
    Complex mp = family_rho1_mean(fam, t + Complex(h, 0));
    Complex mm = family_rho1_mean(fam, t - Complex(h, 0));
    Complex m0 = family_rho1_mean(fam, t);
    CHECK(std::abs(transversality_derivative(fam, t) - (mp - mm) / (2 * h)) <= 1e-7);
    CHECK(std::abs(transversality_second(fam, t) - (mp - 2.0 * m0 + mm) / (h * h)) <= 1e-7);
}

TEST_CASE("hypothesis suite: pass, named failure, resonance, transversality window") {
    ParamFamily fam = two_mode_family(1e-4);
    EngineConfig cfg;
    // the strip norm of the family is e^{2 pi delta} eps ~ 1.87e-4, so the
    // size items need the next decade to certify
    cfg.epsilon = Real("1e-3");
    HypothesisReport rep = verify_hypotheses(fam, cfg);
    CHECK(rep.all_pass);
    CHECK(rep.transversal);
    CHECK(std::abs(rep.delta0 - Complex(1, 0)) <= 1e-12);

    // family sized 1e-4 against epsilon 1e-6: the size items fail by name,
    // nothing throws
    cfg.epsilon = Real("1e-6");
    HypothesisReport small = verify_hypotheses(fam, cfg);
    CHECK(!small.all_pass);
    bool found = false;
    for (const HypothesisReport::Item& it : small.items)
        if (it.name == "rho0-size") {
            found = true;
            CHECK(!it.pass);
        }
    CHECK(found);

    ParamFamily resonant = two_mode_family(1e-4);
    resonant.base.beta = resonant.base.alpha;
    bool threw = false;
    try {
        verify_hypotheses(resonant, EngineConfig{});
    } catch (const RationalPair& e) {
        threw = true;
        CHECK(e.k() == 1);
    }
    CHECK(threw);

    // coupling slope 3 falls outside the window (1/2, 2)
    ParamFamily steep = two_mode_family(1e-4);
    StripFunction triple(0, Real("0.1"));
    triple.coeff_ref(0) = Complex(3, 0);
    steep.rho1_poly.clear();
    steep.rho1_poly.push_back(triple);
    HypothesisReport out = verify_hypotheses(steep, EngineConfig{});
    CHECK(!out.transversal);
    CHECK_THROWS_AS(prepare(steep, EngineConfig{}), ConfigError);
}

TEST_CASE("single-mode curve part: the first stage kills it") {
    Real alpha = oracle::golden();
    Real strip("0.1");
    StripFunction rho0(1, strip);
    rho0.coeff_ref(1) = Complex(1e-4, 0);
    StripFunction rho1(1, strip); // zero; the coupling supplies the parameter
    std::vector<StripFunction> taylor;
    StripFunction quad(0, strip);
    quad.coeff_ref(0) = Complex(1, 0);
    taylor.push_back(quad);
    ParamFamily fam =
        linear_family(make_jet(alpha, alpha / 2, rho0, rho1, taylor, strip, Real(1), 128, 6));

    KamResult res = run(fam, EngineConfig{});
    REQUIRE(!res.state.traces.empty());
    const StageTrace& first = res.state.traces.front();
    CHECK(first.i_n >= 1);
    CHECK(first.log10_rho0_out <= first.log10_rho0_in - 3);
    CHECK(res.residual <= 1e-10);
}

TEST_CASE("zero curve part: no translation steps, exact invariance") {
    Real alpha = oracle::golden();
    Real strip("0.1");
    StripFunction rho0(1, strip); // zero
    StripFunction rho1(1, strip); // zero
    std::vector<StripFunction> taylor;
    StripFunction quad(0, strip);
    quad.coeff_ref(0) = Complex(1, 0);
    taylor.push_back(quad);
    ParamFamily fam =
        linear_family(make_jet(alpha, alpha / 2, rho0, rho1, taylor, strip, Real(1), 128, 6));

    KamResult res = run(fam, EngineConfig{});
    for (const StageTrace& tr : res.state.traces) CHECK(tr.i_n == 0);
    CHECK(res.residual <= 1e-12);
    CHECK(std::abs(res.t_bar) <= 1e-12);
    CHECK(res.sup_u <= 1e-12);
}

TEST_CASE("adaptive run: certified quantities, conjugacy, replay, drift") {
    ParamFamily fam = two_mode_family(1e-4);
    EngineConfig cfg;
    KamResult res = run(fam, cfg);

    CHECK(std::abs(res.t_bar) <= 1e-3);
    CHECK(res.residual <= 1e-10);
    CHECK(res.rotation_error <= 1e-8);
    CHECK(res.defect <= 1e-8);
    CHECK(res.sup_u <= 1e-3);
    CHECK(res.lambda_drift <= 1e-6);
    CHECK(res.u1_degree_zero);
    REQUIRE(res.state.traces.size() >= 2);
    double prev_disc = 1.0;
    for (const StageTrace& tr : res.state.traces) {
        CHECK(tr.log10_rho0_out <= tr.log10_rho0_in - 1);
        CHECK(tr.disc_radius_end >= 0.375);
        CHECK(tr.disc_radius_end <= prev_disc + 1e-15);
        CHECK(tr.nesting_ok);
        prev_disc = tr.disc_radius_end;
    }

    // telescoped conjugacy: the replayed jet is H^{-1} o F o H pointwise
    ReplayOutput acc = replay(fam, cfg, res.state.plans, res.state.plans.size(), res.t_bar, true);
    FiberedJet Ft = family_jet(fam, res.t_bar);
    oracle::Rng rng(2026);
    for (int k = 0; k < 50; ++k) {
        double theta = rng.uniform();
        Complex z = 0.3 * rng.csym(1.0);
        Complex A = eval(acc.conj.u0, theta);
        Complex B = eval(acc.conj.u1, theta);
        auto [theta_out, w] = evaluate(Ft, Complex(theta, 0), A + B * z);
        Complex As = eval(acc.conj.u0, theta_out.real(), theta_out.imag());
        Complex Bs = eval(acc.conj.u1, theta_out.real(), theta_out.imag());
        Complex lhs = (w - As) / Bs;
        Complex rhs = evaluate(acc.jet, Complex(theta, 0), z).second;
        CHECK(std::abs(lhs - rhs) <= 1e-9 * (1 + std::abs(rhs)));
    }

    // replay is bit-deterministic
    ReplayOutput again =
        replay(fam, cfg, res.state.plans, res.state.plans.size(), res.t_bar, true);
    bool same = acc.jet.rho0.order == again.jet.rho0.order &&
                acc.jet.rho1.order == again.jet.rho1.order;
    for (int k = -acc.jet.rho0.order; same && k <= acc.jet.rho0.order; ++k)
        same = acc.jet.rho0.coeff(k) == again.jet.rho0.coeff(k);
    for (int k = -acc.jet.rho1.order; same && k <= acc.jet.rho1.order; ++k)
        same = acc.jet.rho1.coeff(k) == again.jet.rho1.coeff(k);
    CHECK(same);

    // the cached stage jet is the replay at the final center
    REQUIRE(res.state.jet_valid);
    ReplayOutput cached =
        replay(fam, cfg, res.state.plans, res.state.plans.size(), res.state.t_center);
    CHECK(cached.jet.rho0.coeff(0) == res.state.jet.rho0.coeff(0));
    CHECK(cached.jet.rho1.coeff(0) == res.state.jet.rho1.coeff(0));
    CHECK(cached.jet.rho1.coeff(1) == res.state.jet.rho1.coeff(1));

    bool threw = false;
    try {
        replay(fam, cfg, res.state.plans, res.state.plans.size() + 1, res.t_bar);
    } catch (const DomainViolation& e) {
        threw = true;
        CHECK(e.code() == std::string("log-overrun"));
    }
    CHECK(threw);

    // the stage drifts account for the measured rotation number mod 1
    Complex prod(1, 0);
    for (Complex r : acc.lambda_ratios) prod *= r;
    double drift = std::arg(prod) / (2 * std::acos(-1.0));
    double d = res.rotation - to_double(frac_part(fam.base.beta)) - drift;
    CHECK(std::abs(d - std::round(d)) <= 1e-8);
}

TEST_CASE("schedule-faithful model: calibrated run hits every certificate") {
    ToyConfig tc;
    Real alpha = oracle::golden();
    ToyPlan plan = plan_paper_toy(alpha, alpha / 2, tc);
    Real log_eps = plan.log_eps_bar - log(Real(100));
    tc.epsilon = exp(log_eps);
    ToyFamily fam = calibrated_toy_family(log_eps);

    ToyResult res = run_paper_toy(fam, tc);
    CHECK(res.n_star == plan.n_star);
    CHECK(res.all_certificates_pass);
    REQUIRE(res.main_stages.size() == 3);
    for (std::size_t i = 0; i < res.main_stages.size(); ++i) {
        const StageTrace& tr = res.main_stages[i];
        CHECK(tr.n == res.n_bar + static_cast<int>(i));
        CHECK(tr.cert_rho0_ok);
        CHECK(tr.cert_drho1_ok);
        CHECK(tr.cert_radius_ok);
        CHECK(tr.nesting_ok);
        CHECK(tr.disc_radius_end >= 0.375);
    }

    // the centering zero is -rho1_base to near machine relative accuracy
    LogComplex center_err = lc_add(res.t_star, fam.rho1_base);
    CHECK(to_double(center_err.logmag - fam.rho1_base.logmag) <= std::log(1e-6));
    // the final parameter stays inside the last certified disc
    LogComplex drift = lc_add(res.t_bar, fam.rho1_base);
    CHECK(to_double(drift.logmag) <= std::log(res.main_stages.back().p_radius) + 1e-9);
}

TEST_CASE("schedule-faithful model: deep sizes run preparation stages") {
    ToyConfig tc;
    Real alpha = oracle::golden();
    ToyPlan plan = plan_paper_toy(alpha, alpha / 2, tc);
    Real log_eps = plan.log_eps_bar - log(Real("1e30"));
    tc.epsilon = exp(log_eps);
    ToyFamily fam = calibrated_toy_family(log_eps);

    ToyResult res = run_paper_toy(fam, tc);
    CHECK(res.all_certificates_pass);
    CHECK(res.n_bar > res.n_star);
    REQUIRE(!res.prep_stages.empty());
    const StageTrace& first = res.prep_stages.front();
    CHECK(first.i_n >= 1);
    // a single twisted translation removes the whole one-mode curve part
    CHECK(first.log10_rho0_out <= first.log10_rho0_in - 50);
}

TEST_CASE("schedule-faithful model: refusals carry their reason") {
    ToyConfig tc;
    Real alpha = oracle::golden();
    ToyPlan plan = plan_paper_toy(alpha, alpha / 2, tc);
    Real log_eps_ok = plan.log_eps_bar - log(Real(100));

    // size above the admissibility threshold
    tc.epsilon = exp(plan.log_eps_bar + log(Real(10)));
    ToyFamily fam = calibrated_toy_family(log_eps_ok);
    bool threw = false;
    try {
        run_paper_toy(fam, tc);
    } catch (const ConfigError& e) {
        threw = true;
        CHECK(contains(e.what(), "admissibility"));
    }
    CHECK(threw);

    // coupling bound so large the zero-search radius is undefined
    tc.epsilon = exp(log_eps_ok);
    tc.T = 1e300;
    threw = false;
    try {
        run_paper_toy(fam, tc);
    } catch (const ConfigError& e) {
        threw = true;
        CHECK(contains(e.what(), "discriminant"));
    }
    CHECK(threw);
    tc.T = 1;

    // curve mode beyond the first truncation
    ToyFamily wide = calibrated_toy_family(log_eps_ok);
    wide.mode = 4096;
    threw = false;
    try {
        run_paper_toy(wide, tc);
    } catch (const ConfigError& e) {
        threw = true;
        CHECK(contains(e.what(), "truncation"));
    }
    CHECK(threw);

    // the adaptive engine refuses the schedule-faithful switch outright
    ParamFamily grid_family = two_mode_family(1e-4);
    EngineConfig ec;
    ec.mode = EngineMode::paper_faithful;
    CHECK_THROWS_AS(run(grid_family, ec), ConfigError);
    EngineState st;
    CHECK_THROWS_AS(resume(grid_family, ec, std::move(st)), ConfigError);
}
