#include "fhkam/serialization.hpp"

#include "fhkam/errors.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace fhkam {

namespace {

const Json* find(const Json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const Json& need(const Json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError("serialization", path + "." + key + ": missing required key");
    return *it;
}

double num_at(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("serialization", path + ": expected a number");
    return v.get<double>();
}

int int_at(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError("serialization", path + ": expected an integer");
    return v.get<int>();
}

bool bool_at(const Json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError("serialization", path + ": expected a boolean");
    return v.get<bool>();
}

std::string str_at(const Json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError("serialization", path + ": expected a string");
    return v.get<std::string>();
}

const Json& array_at(const Json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError("serialization", path + ": expected an array");
    return v;
}

} // namespace

void require_keys(const Json& j, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError("serialization", path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("serialization", path + "." + it.key() + ": unknown key");
    }
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from(const Json& j, const std::string& path) {
    const Json& a = array_at(j, path);
    if (a.size() != 2)
        throw ConfigError("serialization", path + ": expected [re, im]");
    return {num_at(a[0], path + "[0]"), num_at(a[1], path + "[1]")};
}

Json real_json(const Real& x) { return to_string_hp(x); }

Real real_from(const Json& j, const std::string& path) {
    if (j.is_number()) return Real(j.get<double>());
    if (j.is_array()) {
        std::vector<long long> quotients;
        quotients.reserve(j.size());
        for (std::size_t i = 0; i < j.size(); ++i) {
            const Json& e = j[i];
            if (!e.is_number_integer() || e.get<long long>() < 1)
                throw ConfigError("serialization", path + "[" + std::to_string(i) +
                                                       "]: quotient list entries must be "
                                                       "positive integers");
            quotients.push_back(e.get<long long>());
        }
        if (quotients.empty())
            throw ConfigError("serialization", path + ": quotient list must be nonempty");
        return cf_value(quotients);
    }
    std::string s = str_at(j, path);
    if (s == "golden") return (sqrt(Real(5)) - 1) / 2;
    if (s == "sqrt2-1") return sqrt(Real(2)) - 1;
    try {
        return parse_decimal(s).value;
    } catch (const Error& e) {
        throw ConfigError("serialization", path + ": " + e.what());
    }
}

Json strip_json(const StripFunction& f) {
    Json j;
    j["order"] = f.order;
    j["strip"] = real_json(f.strip);
    j["slack"] = f.slack;
    Json re = Json::array();
    Json im = Json::array();
    for (int k = -f.order; k <= f.order; ++k) {
        Complex c = f.coeff(k);
        re.push_back(c.real());
        im.push_back(c.imag());
    }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j;
}

StripFunction strip_from(const Json& j, const std::string& path) {
    require_keys(j, path, {"order", "strip", "slack", "re", "im"});
    int order = int_at(need(j, path, "order"), path + ".order");
    if (order < 0) throw ConfigError("serialization", path + ".order: must be >= 0");
    StripFunction f(order, real_from(need(j, path, "strip"), path + ".strip"));
    if (const Json* v = find(j, "slack")) f.slack = num_at(*v, path + ".slack");
    const Json& re = array_at(need(j, path, "re"), path + ".re");
    const Json& im = array_at(need(j, path, "im"), path + ".im");
    std::size_t want = static_cast<std::size_t>(2 * order + 1);
    if (re.size() != want || im.size() != want)
        throw ConfigError("serialization",
            path + ": re and im must list 2*order+1 = " + std::to_string(want) + " entries");
    for (int k = -order; k <= order; ++k) {
        std::size_t idx = static_cast<std::size_t>(k + order);
        f.coeff_ref(k) = Complex(num_at(re[idx], path + ".re"), num_at(im[idx], path + ".im"));
    }
    return f;
}

Json jet_json(const FiberedJet& F) {
    Json j;
    j["alpha"] = real_json(F.alpha);
    j["beta"] = real_json(F.beta);
    j["strip"] = real_json(F.strip);
    j["disc_radius"] = real_json(F.disc_radius);
    j["fourier_cap"] = F.fourier_cap;
    j["taylor_cap"] = F.taylor_cap;
    j["rho0"] = strip_json(F.rho0);
    j["rho1"] = strip_json(F.rho1);
    Json taylor = Json::array();
    for (const StripFunction& f : F.rho_taylor) taylor.push_back(strip_json(f));
    j["rho_taylor"] = std::move(taylor);
    return j;
}

FiberedJet jet_from(const Json& j, const std::string& path) {
    require_keys(j, path,
                 {"alpha", "beta", "strip", "disc_radius", "fourier_cap", "taylor_cap", "rho0",
                  "rho1", "rho_taylor"});
    Real alpha = real_from(need(j, path, "alpha"), path + ".alpha");
    Real beta = real_from(need(j, path, "beta"), path + ".beta");
    Real strip = real_from(need(j, path, "strip"), path + ".strip");
    Real disc = Real(1);
    if (const Json* v = find(j, "disc_radius")) disc = real_from(*v, path + ".disc_radius");
    int fourier_cap = 128;
    if (const Json* v = find(j, "fourier_cap")) fourier_cap = int_at(*v, path + ".fourier_cap");
    int taylor_cap = 8;
    if (const Json* v = find(j, "taylor_cap")) taylor_cap = int_at(*v, path + ".taylor_cap");
    StripFunction rho0 = strip_from(need(j, path, "rho0"), path + ".rho0");
    StripFunction rho1 = strip_from(need(j, path, "rho1"), path + ".rho1");
    std::vector<StripFunction> taylor;
    if (const Json* v = find(j, "rho_taylor")) {
        const Json& a = array_at(*v, path + ".rho_taylor");
        for (std::size_t i = 0; i < a.size(); ++i)
            taylor.push_back(strip_from(a[i], path + ".rho_taylor[" + std::to_string(i) + "]"));
    }
    return make_jet(alpha, beta, std::move(rho0), std::move(rho1), std::move(taylor), strip, disc,
                    fourier_cap, taylor_cap);
}

Json family_json(const ParamFamily& family) {
    Json j = jet_json(family.base);
    Json p0 = Json::array();
    for (const StripFunction& f : family.rho0_poly) p0.push_back(strip_json(f));
    j["rho0_poly"] = std::move(p0);
    Json p1 = Json::array();
    for (const StripFunction& f : family.rho1_poly) p1.push_back(strip_json(f));
    j["rho1_poly"] = std::move(p1);
    return j;
}

ParamFamily family_from(const Json& j, const std::string& path) {
    require_keys(j, path,
                 {"alpha", "beta", "strip", "disc_radius", "fourier_cap", "taylor_cap", "rho0",
                  "rho1", "rho_taylor", "rho0_poly", "rho1_poly"});
    Json base = j;
    base.erase("rho0_poly");
    base.erase("rho1_poly");
    ParamFamily family;
    family.base = jet_from(base, path);
    if (const Json* v = find(j, "rho0_poly")) {
        const Json& a = array_at(*v, path + ".rho0_poly");
        for (std::size_t i = 0; i < a.size(); ++i)
            family.rho0_poly.push_back(
                strip_from(a[i], path + ".rho0_poly[" + std::to_string(i) + "]"));
    }
    if (const Json* v = find(j, "rho1_poly")) {
        const Json& a = array_at(*v, path + ".rho1_poly");
        for (std::size_t i = 0; i < a.size(); ++i)
            family.rho1_poly.push_back(
                strip_from(a[i], path + ".rho1_poly[" + std::to_string(i) + "]"));
    }
    return family;
}

Json config_json(const EngineConfig& config) {
    Json j;
    j["mode"] = config.mode == EngineMode::adaptive ? "adaptive" : "paper";
    j["epsilon"] = real_json(config.epsilon);
    j["L"] = config.L;
    j["M"] = config.M;
    j["T"] = config.T;
    j["aleph"] = real_json(config.aleph);
    j["delta"] = real_json(config.delta);
    j["n_start"] = config.n_start;
    j["n_max"] = config.n_max;
    j["step_limit"] = config.step_limit;
    j["global_fourier_cap"] = config.global_fourier_cap;
    j["taylor_cap"] = config.taylor_cap;
    j["target_residual"] = config.target_residual;
    j["quad_samples"] = config.quad_samples;
    j["circle_samples"] = config.circle_samples;
    j["trim_floor"] = config.trim_floor;
    return j;
}

EngineConfig config_from(const Json& j, const std::string& path) {
    require_keys(j, path,
                 {"mode", "epsilon", "L", "M", "T", "aleph", "delta", "n_start", "n_max",
                  "step_limit", "global_fourier_cap", "taylor_cap", "target_residual",
                  "quad_samples", "circle_samples", "trim_floor"});
    EngineConfig c;
    if (const Json* v = find(j, "mode")) {
        std::string m = str_at(*v, path + ".mode");
        if (m == "adaptive")
            c.mode = EngineMode::adaptive;
        else if (m == "paper")
            c.mode = EngineMode::paper_faithful;
        else
            throw ConfigError("serialization",
                path + ".mode: expected \"adaptive\" or \"paper\", got \"" + m + "\"");
    }
    if (const Json* v = find(j, "epsilon")) c.epsilon = real_from(*v, path + ".epsilon");
    if (const Json* v = find(j, "L")) c.L = num_at(*v, path + ".L");
    if (const Json* v = find(j, "M")) c.M = num_at(*v, path + ".M");
    if (const Json* v = find(j, "T")) c.T = num_at(*v, path + ".T");
    if (const Json* v = find(j, "aleph")) c.aleph = real_from(*v, path + ".aleph");
    if (const Json* v = find(j, "delta")) c.delta = real_from(*v, path + ".delta");
    if (const Json* v = find(j, "n_start")) c.n_start = int_at(*v, path + ".n_start");
    if (const Json* v = find(j, "n_max")) c.n_max = int_at(*v, path + ".n_max");
    if (const Json* v = find(j, "step_limit")) c.step_limit = int_at(*v, path + ".step_limit");
    if (const Json* v = find(j, "global_fourier_cap"))
        c.global_fourier_cap = int_at(*v, path + ".global_fourier_cap");
    if (const Json* v = find(j, "taylor_cap")) c.taylor_cap = int_at(*v, path + ".taylor_cap");
    if (const Json* v = find(j, "target_residual"))
        c.target_residual = num_at(*v, path + ".target_residual");
    if (const Json* v = find(j, "quad_samples"))
        c.quad_samples = int_at(*v, path + ".quad_samples");
    if (const Json* v = find(j, "circle_samples"))
        c.circle_samples = int_at(*v, path + ".circle_samples");
    if (const Json* v = find(j, "trim_floor")) c.trim_floor = num_at(*v, path + ".trim_floor");
    return c;
}

Json plan_json(const StagePlan& plan) {
    Json j;
    j["n"] = plan.n;
    j["trunc"] = plan.trunc;
    j["i_n"] = plan.i_n;
    j["linear_step"] = plan.linear_step;
    j["strip_out"] = real_json(plan.strip_out);
    return j;
}

StagePlan plan_from(const Json& j, const std::string& path) {
    require_keys(j, path, {"n", "trunc", "i_n", "linear_step", "strip_out"});
    StagePlan p;
    p.n = int_at(need(j, path, "n"), path + ".n");
    p.trunc = int_at(need(j, path, "trunc"), path + ".trunc");
    p.i_n = int_at(need(j, path, "i_n"), path + ".i_n");
    p.linear_step = bool_at(need(j, path, "linear_step"), path + ".linear_step");
    p.strip_out = real_from(need(j, path, "strip_out"), path + ".strip_out");
    return p;
}

Json step_trace_json(const StepTrace& step) {
    Json j;
    j["n"] = step.n;
    j["i"] = step.i;
    j["log10_eta"] = step.log10_eta;
    j["log10_u0"] = step.log10_u0;
    j["disc_radius"] = step.disc_radius;
    return j;
}

StepTrace step_trace_from(const Json& j, const std::string& path) {
    require_keys(j, path, {"n", "i", "log10_eta", "log10_u0", "disc_radius"});
    StepTrace s;
    s.n = int_at(need(j, path, "n"), path + ".n");
    s.i = int_at(need(j, path, "i"), path + ".i");
    s.log10_eta = num_at(need(j, path, "log10_eta"), path + ".log10_eta");
    s.log10_u0 = num_at(need(j, path, "log10_u0"), path + ".log10_u0");
    s.disc_radius = num_at(need(j, path, "disc_radius"), path + ".disc_radius");
    return s;
}

Json stage_trace_json(const StageTrace& trace) {
    Json j;
    j["n"] = trace.n;
    j["trunc"] = trace.trunc;
    j["i_n"] = trace.i_n;
    Json steps = Json::array();
    for (const StepTrace& s : trace.steps) steps.push_back(step_trace_json(s));
    j["steps"] = std::move(steps);
    j["log10_rho0_in"] = trace.log10_rho0_in;
    j["log10_rho0_out"] = trace.log10_rho0_out;
    j["log10_eta_stop"] = trace.log10_eta_stop;
    j["log10_rho1_out"] = trace.log10_rho1_out;
    j["log10_drho1_out"] = trace.log10_drho1_out;
    j["log10_u1_dev"] = trace.log10_u1_dev;
    j["lambda_ratio"] = complex_json(trace.lambda_ratio);
    j["measured_d2z"] = trace.measured_d2z;
    j["measured_dg"] = trace.measured_dg;
    j["strip_in"] = trace.strip_in;
    j["strip_out"] = trace.strip_out;
    j["disc_radius_end"] = trace.disc_radius_end;
    j["t_center"] = complex_json(trace.t_center);
    j["t_move"] = trace.t_move;
    j["p_radius"] = trace.p_radius;
    j["nesting_ok"] = trace.nesting_ok;
    j["slack"] = trace.slack;
    j["log10_w_next"] = trace.log10_w_next;
    j["log10_l_next"] = trace.log10_l_next;
    j["cert_rho0_ok"] = trace.cert_rho0_ok;
    j["cert_drho1_ok"] = trace.cert_drho1_ok;
    j["cert_radius_ok"] = trace.cert_radius_ok;
    return j;
}

StageTrace stage_trace_from(const Json& j, const std::string& path) {
    require_keys(j, path,
                 {"n", "trunc", "i_n", "steps", "log10_rho0_in", "log10_rho0_out",
                  "log10_eta_stop", "log10_rho1_out", "log10_drho1_out", "log10_u1_dev",
                  "lambda_ratio", "measured_d2z", "measured_dg", "strip_in", "strip_out",
                  "disc_radius_end", "t_center", "t_move", "p_radius", "nesting_ok", "slack",
                  "log10_w_next", "log10_l_next", "cert_rho0_ok", "cert_drho1_ok",
                  "cert_radius_ok"});
    StageTrace t;
    t.n = int_at(need(j, path, "n"), path + ".n");
    t.trunc = int_at(need(j, path, "trunc"), path + ".trunc");
    t.i_n = int_at(need(j, path, "i_n"), path + ".i_n");
    const Json& steps = array_at(need(j, path, "steps"), path + ".steps");
    for (std::size_t i = 0; i < steps.size(); ++i)
        t.steps.push_back(step_trace_from(steps[i], path + ".steps[" + std::to_string(i) + "]"));
    t.log10_rho0_in = num_at(need(j, path, "log10_rho0_in"), path + ".log10_rho0_in");
    t.log10_rho0_out = num_at(need(j, path, "log10_rho0_out"), path + ".log10_rho0_out");
    t.log10_eta_stop = num_at(need(j, path, "log10_eta_stop"), path + ".log10_eta_stop");
    t.log10_rho1_out = num_at(need(j, path, "log10_rho1_out"), path + ".log10_rho1_out");
    t.log10_drho1_out = num_at(need(j, path, "log10_drho1_out"), path + ".log10_drho1_out");
    t.log10_u1_dev = num_at(need(j, path, "log10_u1_dev"), path + ".log10_u1_dev");
    t.lambda_ratio = complex_from(need(j, path, "lambda_ratio"), path + ".lambda_ratio");
    t.measured_d2z = num_at(need(j, path, "measured_d2z"), path + ".measured_d2z");
    t.measured_dg = num_at(need(j, path, "measured_dg"), path + ".measured_dg");
    t.strip_in = num_at(need(j, path, "strip_in"), path + ".strip_in");
    t.strip_out = num_at(need(j, path, "strip_out"), path + ".strip_out");
    t.disc_radius_end = num_at(need(j, path, "disc_radius_end"), path + ".disc_radius_end");
    t.t_center = complex_from(need(j, path, "t_center"), path + ".t_center");
    t.t_move = num_at(need(j, path, "t_move"), path + ".t_move");
    t.p_radius = num_at(need(j, path, "p_radius"), path + ".p_radius");
    t.nesting_ok = bool_at(need(j, path, "nesting_ok"), path + ".nesting_ok");
    t.slack = num_at(need(j, path, "slack"), path + ".slack");
    t.log10_w_next = num_at(need(j, path, "log10_w_next"), path + ".log10_w_next");
    t.log10_l_next = num_at(need(j, path, "log10_l_next"), path + ".log10_l_next");
    t.cert_rho0_ok = bool_at(need(j, path, "cert_rho0_ok"), path + ".cert_rho0_ok");
    t.cert_drho1_ok = bool_at(need(j, path, "cert_drho1_ok"), path + ".cert_drho1_ok");
    t.cert_radius_ok = bool_at(need(j, path, "cert_radius_ok"), path + ".cert_radius_ok");
    return t;
}

Json hypothesis_json(const HypothesisReport& report) {
    Json j;
    Json items = Json::array();
    for (const HypothesisReport::Item& it : report.items) {
        Json e;
        e["name"] = it.name;
        e["log10_value"] = it.log10_value;
        e["log10_bound"] = it.log10_bound;
        e["pass"] = it.pass;
        items.push_back(std::move(e));
    }
    j["items"] = std::move(items);
    j["delta0"] = complex_json(report.delta0);
    j["transversal"] = report.transversal;
    j["all_pass"] = report.all_pass;
    return j;
}

HypothesisReport hypothesis_from(const Json& j, const std::string& path) {
    require_keys(j, path, {"items", "delta0", "transversal", "all_pass"});
    HypothesisReport r;
    const Json& items = array_at(need(j, path, "items"), path + ".items");
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::string p = path + ".items[" + std::to_string(i) + "]";
        require_keys(items[i], p, {"name", "log10_value", "log10_bound", "pass"});
        HypothesisReport::Item it;
        it.name = str_at(need(items[i], p, "name"), p + ".name");
        it.log10_value = num_at(need(items[i], p, "log10_value"), p + ".log10_value");
        it.log10_bound = num_at(need(items[i], p, "log10_bound"), p + ".log10_bound");
        it.pass = bool_at(need(items[i], p, "pass"), p + ".pass");
        r.items.push_back(std::move(it));
    }
    r.delta0 = complex_from(need(j, path, "delta0"), path + ".delta0");
    r.transversal = bool_at(need(j, path, "transversal"), path + ".transversal");
    r.all_pass = bool_at(need(j, path, "all_pass"), path + ".all_pass");
    return r;
}

Json prep_report_json(const PreparationReport& prep) {
    Json j;
    j["n_bar"] = prep.n_bar;
    j["t_star"] = complex_json(prep.t_star);
    j["delta0"] = complex_json(prep.delta0);
    j["zero_radius"] = prep.zero_radius;
    j["log10_R_eps"] = prep.log10_R_eps;
    j["log10_K_R"] = prep.log10_K_R;
    j["r_eps_defined"] = prep.r_eps_defined;
    j["log10_W"] = prep.log10_W;
    j["hypotheses"] = hypothesis_json(prep.hypotheses);
    return j;
}

PreparationReport prep_report_from(const Json& j, const std::string& path) {
    require_keys(j, path,
                 {"n_bar", "t_star", "delta0", "zero_radius", "log10_R_eps", "log10_K_R",
                  "r_eps_defined", "log10_W", "hypotheses"});
    PreparationReport p;
    p.n_bar = int_at(need(j, path, "n_bar"), path + ".n_bar");
    p.t_star = complex_from(need(j, path, "t_star"), path + ".t_star");
    p.delta0 = complex_from(need(j, path, "delta0"), path + ".delta0");
    p.zero_radius = num_at(need(j, path, "zero_radius"), path + ".zero_radius");
    p.log10_R_eps = num_at(need(j, path, "log10_R_eps"), path + ".log10_R_eps");
    p.log10_K_R = num_at(need(j, path, "log10_K_R"), path + ".log10_K_R");
    p.r_eps_defined = bool_at(need(j, path, "r_eps_defined"), path + ".r_eps_defined");
    const Json& w = array_at(need(j, path, "log10_W"), path + ".log10_W");
    for (std::size_t i = 0; i < w.size(); ++i)
        p.log10_W.push_back(num_at(w[i], path + ".log10_W[" + std::to_string(i) + "]"));
    p.hypotheses = hypothesis_from(need(j, path, "hypotheses"), path + ".hypotheses");
    return p;
}

Json state_json(const EngineState& state) {
    Json j;
    Json plans = Json::array();
    for (const StagePlan& p : state.plans) plans.push_back(plan_json(p));
    j["plans"] = std::move(plans);
    j["t_center"] = complex_json(state.t_center);
    j["p_radius"] = state.p_radius;
    j["next_n"] = state.next_n;
    Json traces = Json::array();
    for (const StageTrace& t : state.traces) traces.push_back(stage_trace_json(t));
    j["traces"] = std::move(traces);
    j["prep"] = prep_report_json(state.prep);
    j["jet_valid"] = state.jet_valid;
    if (state.jet_valid) j["jet"] = jet_json(state.jet);
    return j;
}

EngineState state_from(const Json& j, const std::string& path) {
    require_keys(j, path,
                 {"plans", "t_center", "p_radius", "next_n", "traces", "prep", "jet_valid",
                  "jet"});
    EngineState s;
    const Json& plans = array_at(need(j, path, "plans"), path + ".plans");
    for (std::size_t i = 0; i < plans.size(); ++i)
        s.plans.push_back(plan_from(plans[i], path + ".plans[" + std::to_string(i) + "]"));
    s.t_center = complex_from(need(j, path, "t_center"), path + ".t_center");
    s.p_radius = num_at(need(j, path, "p_radius"), path + ".p_radius");
    s.next_n = int_at(need(j, path, "next_n"), path + ".next_n");
    const Json& traces = array_at(need(j, path, "traces"), path + ".traces");
    for (std::size_t i = 0; i < traces.size(); ++i)
        s.traces.push_back(
            stage_trace_from(traces[i], path + ".traces[" + std::to_string(i) + "]"));
    s.prep = prep_report_from(need(j, path, "prep"), path + ".prep");
    s.jet_valid = bool_at(need(j, path, "jet_valid"), path + ".jet_valid");
    if (s.jet_valid) s.jet = jet_from(need(j, path, "jet"), path + ".jet");
    return s;
}

Json result_json(const KamResult& result) {
    Json j;
    j["t_bar"] = complex_json(result.t_bar);
    j["rotation"] = result.rotation;
    j["rotation_error"] = result.rotation_error;
    j["residual"] = result.residual;
    j["defect"] = result.defect;
    j["sup_u"] = result.sup_u;
    j["lambda_drift"] = result.lambda_drift;
    j["u1_degree_zero"] = result.u1_degree_zero;
    Json curve;
    curve["curve"] = strip_json(result.curve.curve);
    curve["t_bar"] = complex_json(result.curve.t_bar);
    curve["strip"] = real_json(result.curve.strip);
    j["curve"] = std::move(curve);
    j["u1_product"] = strip_json(result.u1_product);
    j["final_jet"] = jet_json(result.final_jet);
    j["state"] = state_json(result.state);
    return j;
}

Json lc_json(const LogComplex& a) {
    Json j;
    if (lc_is_zero(a))
        j["logmag"] = nullptr;
    else
        j["logmag"] = real_json(a.logmag);
    j["phase"] = complex_json(a.phase);
    j["log10"] = lc_log10(a);
    return j;
}

LogComplex lc_from_json(const Json& j, const std::string& path) {
    require_keys(j, path, {"logmag", "phase", "log10"});
    const Json& lm = need(j, path, "logmag");
    if (lm.is_null()) return lc_zero();
    Real logmag = real_from(lm, path + ".logmag");
    Complex phase = complex_from(need(j, path, "phase"), path + ".phase");
    double a = std::abs(phase);
    if (!(a > 0)) throw ConfigError("serialization", path + ".phase: must be nonzero");
    return LogComplex(std::move(logmag), phase / a);
}

Json toy_family_json(const ToyFamily& family) {
    Json j;
    j["alpha"] = real_json(family.alpha);
    j["beta"] = real_json(family.beta);
    j["mode"] = family.mode;
    j["rho0_log10"] = lc_log10(family.rho0_coeff);
    j["rho0_phase"] = complex_json(family.rho0_coeff.phase);
    j["rho1_log10"] = lc_log10(family.rho1_base);
    j["rho1_phase"] = complex_json(family.rho1_base.phase);
    return j;
}

ToyFamily toy_family_from(const Json& j, const std::string& path) {
    require_keys(j, path,
                 {"alpha", "beta", "mode", "rho0_log10", "rho0_phase", "rho1_log10",
                  "rho1_phase"});
    ToyFamily f;
    f.alpha = real_from(need(j, path, "alpha"), path + ".alpha");
    f.beta = real_from(need(j, path, "beta"), path + ".beta");
    if (const Json* v = find(j, "mode")) f.mode = int_at(*v, path + ".mode");
    Complex p0{1, 0};
    if (const Json* v = find(j, "rho0_phase")) p0 = complex_from(*v, path + ".rho0_phase");
    Complex p1{1, 0};
    if (const Json* v = find(j, "rho1_phase")) p1 = complex_from(*v, path + ".rho1_phase");
    f.rho0_coeff = lc_make_log10(num_at(need(j, path, "rho0_log10"), path + ".rho0_log10"), p0);
    f.rho1_base = lc_make_log10(num_at(need(j, path, "rho1_log10"), path + ".rho1_log10"), p1);
    return f;
}

Json toy_result_json(const ToyResult& result) {
    Json j;
    j["n_star"] = result.n_star;
    j["n_bar"] = result.n_bar;
    j["log10_eps"] = result.log10_eps;
    j["log10_eps_bar"] = result.log10_eps_bar;
    j["log10_R_eps"] = result.log10_R_eps;
    j["log10_K_R"] = result.log10_K_R;
    j["log10_W"] = result.log10_W;
    j["t_star"] = lc_json(result.t_star);
    j["t_bar"] = lc_json(result.t_bar);
    j["prep_radius_log10"] = result.prep_radius_log10;
    Json prep = Json::array();
    for (const StageTrace& t : result.prep_stages) prep.push_back(stage_trace_json(t));
    j["prep_stages"] = std::move(prep);
    Json main = Json::array();
    for (const StageTrace& t : result.main_stages) main.push_back(stage_trace_json(t));
    j["main_stages"] = std::move(main);
    j["all_certificates_pass"] = result.all_certificates_pass;
    return j;
}

void write_stages_csv(std::ostream& out, const std::vector<StageTrace>& traces) {
    out << std::setprecision(17);
    out << "n,i,kind,log10_eta,log10_u0,disc_radius,trunc,log10_rho0_in,log10_rho0_out,"
           "log10_eta_stop,log10_rho1_out,log10_drho1_out,log10_u1_dev,lambda_ratio_re,"
           "lambda_ratio_im,measured_d2z,measured_dg,strip_in,strip_out,t_re,t_im,t_move,"
           "p_radius,nesting_ok,slack,log10_w_next,log10_l_next,cert_rho0,cert_drho1,"
           "cert_radius\n";
    for (const StageTrace& t : traces) {
        for (const StepTrace& s : t.steps)
            out << s.n << ',' << s.i << ",step," << s.log10_eta << ',' << s.log10_u0 << ','
                << s.disc_radius << ",,,,,,,,,,,,,,,,,,,,,,,\n";
        out << t.n << ',' << t.i_n << ",stage,,," << t.disc_radius_end << ',' << t.trunc << ','
            << t.log10_rho0_in << ',' << t.log10_rho0_out << ',' << t.log10_eta_stop << ','
            << t.log10_rho1_out << ',' << t.log10_drho1_out << ',' << t.log10_u1_dev << ','
            << t.lambda_ratio.real() << ',' << t.lambda_ratio.imag() << ',' << t.measured_d2z
            << ',' << t.measured_dg << ',' << t.strip_in << ',' << t.strip_out << ','
            << t.t_center.real() << ',' << t.t_center.imag() << ',' << t.t_move << ','
            << t.p_radius << ',' << (t.nesting_ok ? 1 : 0) << ',' << t.slack << ','
            << t.log10_w_next << ',' << t.log10_l_next << ',' << (t.cert_rho0_ok ? 1 : 0) << ','
            << (t.cert_drho1_ok ? 1 : 0) << ',' << (t.cert_radius_ok ? 1 : 0) << '\n';
    }
}

} // namespace fhkam
