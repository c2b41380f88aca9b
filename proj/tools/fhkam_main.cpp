#include "CLI11.hpp"

#include "fhkam/arithmetic.hpp"
#include "fhkam/cohomology.hpp"
#include "fhkam/errors.hpp"
#include "fhkam/kam_engine.hpp"
#include "fhkam/paper_mode.hpp"
#include "fhkam/schedule.hpp"
#include "fhkam/serialization.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fhkam;

namespace {

constexpr const char* error_schema = "fhkam-error/1";
constexpr const char* checkpoint_schema = "fhkam-checkpoint/1";

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    unsigned precision_bits = 256;
    std::uint64_t seed = 12345;
    std::string mode;     // run-kam only; empty = take from config
    bool resume = false;  // run-kam only
    std::string jet_path; // verify-curve only
    std::string curve_path;
    int verify_samples = 4096;
    double residual_target = 1e-10;
    double rotation_target = 1e-8;
    double defect_target = 1e-8;
};

Json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("report_cli", "cannot open " + path);
    try {
        Json j;
        in >> j;
        return j;
    } catch (const std::exception& e) {
        throw ConfigError("report_cli", path + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("report_cli", "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

double log10_of(const Real& natural_log) { return to_double(natural_log) / std::log(10.0); }

// advisory floor: querying divisors up to 2^log2_range needs roughly twice
// that many bits plus headroom before rounding reaches the certified digits
void warn_precision(unsigned bits, double log2_range, const std::string& what) {
    double needed = 2 * log2_range + 40;
    if (static_cast<double>(bits) < needed)
        std::fprintf(stderr,
                     "warning: precision %u bits is below the %.0f bits advised for %s\n", bits,
                     std::ceil(needed), what.c_str());
}

Real value_at(const Json& j, const char* key, const std::string& path, const Real& fallback) {
    if (!j.contains(key)) return fallback;
    return real_from(j.at(key), path + "." + key);
}

long long integer_at(const Json& j, const char* key, const std::string& path, long long fallback) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_number_integer())
        throw ConfigError("report_cli", path + "." + key + ": expected an integer");
    return v.get<long long>();
}

// ---------- arith ----------

int cmd_arith(const Options& opt) {
    Json j = opt.config_path.empty() ? Json::object() : load_json(opt.config_path);
    require_keys(j, "config", {"alpha", "beta", "depth", "N", "dyadic_max"});
    Real alpha = value_at(j, "alpha", "config", (sqrt(Real(5)) - 1) / 2);
    Real beta = value_at(j, "beta", "config", alpha / 2);
    int depth = static_cast<int>(integer_at(j, "depth", "config", 40));
    long long N = integer_at(j, "N", "config", 10000);
    long long dyadic_max = integer_at(j, "dyadic_max", "config", 4096);
    if (depth < 1 || N < 1 || dyadic_max < 2)
        throw ConfigError("report_cli", "config: depth and N must be >= 1, dyadic_max >= 2");
    warn_precision(opt.precision_bits, std::log2(static_cast<double>(std::max(N, dyadic_max))),
                   "divisor queries up to N = " + std::to_string(std::max(N, dyadic_max)));

    ContinuedFraction cf = cf_expand(alpha, depth);
    Json out;
    out["schema"] = "fhkam-arith/1";
    out["alpha"] = real_json(alpha);
    out["beta"] = real_json(beta);
    out["precision_bits"] = opt.precision_bits;
    out["depth"] = cf.depth();
    Json quots = Json::array();
    for (long long a : cf.quotients) quots.push_back(a);
    out["quotients"] = std::move(quots);
    Json dens = Json::array();
    for (const BigInt& q : cf.denominators) dens.push_back(q.str());
    out["denominators"] = std::move(dens);

    DivisorHit hit = worst_divisor(cf, BigInt(N));
    out["gamma_single"] = Json{{"N", N},
                               {"value", real_json(hit.gamma)},
                               {"log10", log10_of(log(hit.gamma))},
                               {"attain", hit.attain.str()}};

    const BigInt& q_deep = cf.denominators.back();
    int nb = 0;
    int nb_target = static_cast<int>(std::floor(std::log2(static_cast<double>(N))));
    while (nb < nb_target && (BigInt(1) << (nb + 1)) < q_deep) ++nb;
    BrjunoPartial bp = brjuno_partial(cf, nb);
    out["brjuno"] = Json{{"n_max", bp.n_max},
                         {"dyadic", to_double(bp.dyadic)},
                         {"quotient", to_double(bp.quotient)}};

    bool sandwich_ok = true;
    Json rows = Json::array();
    for (int n = 0; (2LL << n) <= dyadic_max && (BigInt(2) << n) < q_deep; ++n) {
        SandwichReport rep = check_dyadic_sandwich(cf, n);
        sandwich_ok = sandwich_ok && rep.holds;
        rows.push_back(Json{{"n", rep.n},
                            {"lower", to_double(rep.lower)},
                            {"middle", to_double(rep.middle)},
                            {"upper", to_double(rep.upper)},
                            {"upper_nolog", to_double(rep.upper_nolog)},
                            {"holds", rep.holds}});
    }
    out["sandwich"] = std::move(rows);
    out["sandwich_all_hold"] = sandwich_ok;

    std::optional<long long> k = is_rational_pair(alpha, beta, 4096, Real("1e-12"));
    out["rational_pair_k"] = k ? Json(*k) : Json(nullptr);
    Json pair_rows = Json::array();
    if (!k) {
        PairDivisorTable table(cf, beta);
        for (long long d = 2; d <= dyadic_max; d *= 2) {
            DivisorHit g = table.at(BigInt(d));
            PairDivisorTable::MinHit m = table.min_distance(BigInt(d));
            pair_rows.push_back(Json{{"N", d},
                                     {"gamma_log10", log10_of(log(g.gamma))},
                                     {"gamma_attain", g.attain.str()},
                                     {"min_distance", real_json(m.dist)},
                                     {"min_attain", m.attain.str()}});
        }
    }
    out["pair_table"] = std::move(pair_rows);

    write_json(fs::path(opt.out_dir) / "arith.json", out);
    std::printf("arith: depth %d, gamma(%lld) ~ 1e%.2f, sandwich %s\n", cf.depth(), N,
                log10_of(log(hit.gamma)), sandwich_ok ? "holds" : "FAILS");
    return sandwich_ok ? 0 : 4;
}

// ---------- schedule ----------

int cmd_schedule(const Options& opt) {
    Json j = opt.config_path.empty() ? Json::object() : load_json(opt.config_path);
    require_keys(j, "config", {"alpha", "beta", "aleph", "n_max", "delta"});
    Real alpha = value_at(j, "alpha", "config", (sqrt(Real(5)) - 1) / 2);
    Real beta = value_at(j, "beta", "config", alpha / 2);
    Real aleph = value_at(j, "aleph", "config", Real(1000000));
    Real delta = value_at(j, "delta", "config", Real("0.1"));
    int n_max = static_cast<int>(integer_at(j, "n_max", "config", 60));
    if (n_max < 2) throw ConfigError("report_cli", "config.n_max: must be >= 2");
    warn_precision(opt.precision_bits, static_cast<double>(n_max),
                   "a schedule of depth n_max = " + std::to_string(n_max));

    ContinuedFraction cf = cf_expand(alpha, 64);
    KamSchedule sched = build_schedule(cf, beta, aleph, n_max);
    int n_star = choose_n_star(sched, delta);
    LemmaReport lemma = verify_lemma_properties(sched);

    Json out;
    out["schema"] = "fhkam-schedule/1";
    out["alpha"] = real_json(alpha);
    out["beta"] = real_json(beta);
    out["aleph"] = real_json(aleph);
    out["delta"] = real_json(delta);
    out["n_max"] = n_max;
    out["n_star"] = n_star;
    out["sum_d0"] = to_double(lemma.sum_d0);
    out["sum_d1"] = to_double(lemma.sum_d1);
    Json items = Json::array();
    for (const LemmaReport::Item& it : lemma.items)
        items.push_back(Json{{"name", it.name},
                             {"value", to_double(it.value)},
                             {"bound", to_double(it.bound)},
                             {"pass", it.pass}});
    out["inequalities"] = std::move(items);
    out["all_pass"] = lemma.all_pass;
    write_json(fs::path(opt.out_dir) / "schedule.json", out);

    std::ofstream csv(fs::path(opt.out_dir) / "stages.csv", std::ios::binary);
    if (!csv) throw ConfigError("report_cli", "cannot write stages.csv");
    csv << "n,log10_A,log10_B,log10_l,log10_w,d0,d1,delta_n\n" << std::setprecision(17);
    for (int n = 0; n <= n_max; ++n) {
        csv << n << ',' << log10_of(sched.logA[n]) << ',' << log10_of(sched.logB[n]) << ','
            << log10_of(sched.log_l[n]) << ',' << log10_of(sched.log_w[n]) << ',';
        if (n < n_max) csv << to_double(sched.d0[n]) << ',' << to_double(sched.d1[n]);
        else csv << ',';
        csv << ',';
        if (n >= n_star) csv << to_double(sched.delta_n[n]);
        csv << '\n';
    }
    csv.close();

    std::printf("schedule: n_star = %d, log10 l_nstar = %.2f, inequalities %s\n", n_star,
                log10_of(sched.log_l[n_star]), lemma.all_pass ? "pass" : "FAIL");
    return lemma.all_pass ? 0 : 4;
}

// ---------- cohomology-test ----------

int cmd_cohomology(const Options& opt) {
    Json j = opt.config_path.empty() ? Json::object() : load_json(opt.config_path);
    require_keys(j, "config", {"alpha", "beta", "order", "count", "samples"});
    Real alpha = value_at(j, "alpha", "config", (sqrt(Real(5)) - 1) / 2);
    Real beta = value_at(j, "beta", "config", alpha / 2);
    int order = static_cast<int>(integer_at(j, "order", "config", 64));
    int count = static_cast<int>(integer_at(j, "count", "config", 50));
    int samples = static_cast<int>(integer_at(j, "samples", "config", 2048));
    if (order < 1 || count < 1 || samples < 4 * order)
        throw ConfigError("report_cli", "config: order, count >= 1 and samples >= 4*order");

    std::mt19937_64 gen(opt.seed);
    auto uniform = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    Real two_pi_beta = 2 * acos(Real(-1)) * beta;
    Complex lambda(to_double(cos(two_pi_beta)), to_double(sin(two_pi_beta)));
    Real strip("0.05");

    double max_untwisted = 0, max_twisted = 0;
    for (int trial = 0; trial < count; ++trial) {
        StripFunction p(order, strip);
        for (int kmode = -order; kmode <= order; ++kmode) {
            if (kmode == 0) continue; // zero mean, exactly
            double decay = std::exp(-std::abs(kmode) / 8.0);
            p.coeff_ref(kmode) = decay * Complex(2 * uniform() - 1, 2 * uniform() - 1);
        }
        double norm_p = to_double(norm_bound(p, Real(0)));

        StripFunction g = solve_untwisted(p, alpha);
        StripFunction res_u = subtract(subtract(g, shift_argument(g, alpha)), p);
        for (Complex v : sample_grid(res_u, samples))
            max_untwisted = std::max(max_untwisted, std::abs(v) / norm_p);

        StripFunction h = solve_twisted(p, alpha, beta);
        StripFunction res_t = subtract(subtract(scale(h, lambda), shift_argument(h, alpha)), p);
        for (Complex v : sample_grid(res_t, samples))
            max_twisted = std::max(max_twisted, std::abs(v) / norm_p);
    }
    bool pass = max_untwisted <= 1e-12 && max_twisted <= 1e-12;

    Json out;
    out["schema"] = "fhkam-cohomology/1";
    out["alpha"] = real_json(alpha);
    out["beta"] = real_json(beta);
    out["seed"] = opt.seed;
    out["order"] = order;
    out["count"] = count;
    out["samples"] = samples;
    out["max_untwisted_ratio"] = max_untwisted;
    out["max_twisted_ratio"] = max_twisted;
    out["tolerance"] = 1e-12;
    out["pass"] = pass;
    write_json(fs::path(opt.out_dir) / "cohomology.json", out);

    std::printf("cohomology: %d trials, residual ratios %.3e (untwisted) %.3e (twisted): %s\n",
                count, max_untwisted, max_twisted, pass ? "pass" : "FAIL");
    return pass ? 0 : 4;
}

// ---------- run-kam ----------

int run_adaptive(const Options& opt, const Json& raw, EngineConfig config) {
    if (raw.contains("paper_family"))
        throw ConfigError("report_cli",
                          "config.paper_family: only valid with mode \"paper\"; adaptive mode "
                          "takes \"family\"");
    if (!raw.contains("family"))
        throw ConfigError("report_cli", "config.family: required in adaptive mode");
    ParamFamily family = family_from(raw.at("family"), "config.family");
    warn_precision(opt.precision_bits, static_cast<double>(config.n_max),
                   "stages up to truncation 2^" + std::to_string(config.n_max));

    fs::path out(opt.out_dir);
    Json config_echo = config_json(config);
    auto checkpoint = [&](const EngineState& state) {
        Json c;
        c["schema"] = checkpoint_schema;
        c["config"] = config_echo;
        c["state"] = state_json(state);
        write_json(out / "checkpoint.json", c);
        write_json(out / ("checkpoint-" + std::to_string(state.traces.size()) + ".json"), c);
        if (!state.traces.empty()) {
            const StageTrace& t = state.traces.back();
            std::fprintf(stderr, "stage n=%d done: log10 |rho0| %.2f -> %.2f, disc %.3f\n", t.n,
                         t.log10_rho0_in, t.log10_rho0_out, t.disc_radius_end);
        }
    };

    KamResult result;
    if (opt.resume) {
        Json saved = load_json((out / "checkpoint.json").string());
        require_keys(saved, "checkpoint", {"schema", "config", "state"});
        if (!saved.contains("schema") || saved.at("schema") != checkpoint_schema)
            throw ConfigError("report_cli", "checkpoint.json: unknown schema");
        if (!saved.contains("config") || !saved.contains("state"))
            throw ConfigError("report_cli", "checkpoint.json: missing config or state");
        if (saved.at("config").dump() != config_echo.dump())
            throw ConfigError("report_cli",
                              "checkpoint.json was produced under a different configuration");
        EngineState state = state_from(saved.at("state"), "checkpoint.state");
        result = resume(family, config, std::move(state), checkpoint);
    } else {
        result = run(family, config, checkpoint);
    }

    Json doc;
    doc["schema"] = "fhkam-result/1";
    doc["generator"] = "fhkam";
    doc["mode"] = "adaptive";
    doc["config"] = config_echo;
    doc["family"] = family_json(family);
    doc["result"] = result_json(result);
    write_json(out / "result.json", doc);

    std::ofstream csv(out / "stages.csv", std::ios::binary);
    if (!csv) throw ConfigError("report_cli", "cannot write stages.csv");
    write_stages_csv(csv, result.state.traces);
    csv.close();

    Json curve;
    curve["schema"] = "fhkam-curve/1";
    curve["curve"] = strip_json(result.curve.curve);
    curve["t_bar"] = complex_json(result.curve.t_bar);
    curve["strip"] = real_json(result.curve.strip);
    write_json(out / "curve.json", curve);
    write_json(out / "family_jet.json", jet_json(family_jet(family, result.t_bar)));

    std::printf("run-kam (adaptive): %zu stages, t_bar = (%.6e, %.6e)\n",
                result.state.traces.size(), result.t_bar.real(), result.t_bar.imag());
    std::printf("  residual %.3e, rotation error %.3e, defect %.3e, sup|u| %.3e\n",
                result.residual, result.rotation_error, result.defect, result.sup_u);
    return 0;
}

int run_paper(const Options& opt, const Json& raw, EngineConfig config) {
    if (raw.contains("family"))
        throw ConfigError("report_cli",
                          "config.family: only valid with mode \"adaptive\"; paper mode takes "
                          "\"paper_family\"");
    if (!raw.contains("paper_family"))
        throw ConfigError("report_cli", "config.paper_family: required in paper mode");
    if (opt.resume)
        throw ConfigError("report_cli", "--resume applies to adaptive mode only");
    ToyFamily family = toy_family_from(raw.at("paper_family"), "config.paper_family");

    ToyConfig toy;
    toy.epsilon = config.epsilon;
    toy.delta = config.delta;
    toy.aleph = config.aleph;
    toy.L = config.L;
    toy.M = config.M;
    toy.T = config.T;
    toy.n_max = config.n_max;
    toy.main_stages = static_cast<int>(integer_at(raw, "main_stages", "config", 3));
    toy.step_limit = config.step_limit;
    toy.circle_samples = config.circle_samples;
    if (!raw.contains("epsilon")) {
        // no size given: sit two decades under the admissibility threshold
        ToyPlan plan = plan_paper_toy(family.alpha, family.beta, toy);
        toy.epsilon = exp(plan.log_eps_bar - log(Real(100)));
        config.epsilon = toy.epsilon;
        std::fprintf(stderr, "note: epsilon not given, calibrated to log10 = %.4f\n",
                     log10_of(log(toy.epsilon)));
    }
    warn_precision(opt.precision_bits, static_cast<double>(config.n_max),
                   "a schedule of depth n_max = " + std::to_string(config.n_max));

    ToyResult result = run_paper_toy(family, toy);

    fs::path out(opt.out_dir);
    Json config_echo = config_json(config);
    config_echo["main_stages"] = toy.main_stages;
    Json doc;
    doc["schema"] = "fhkam-result/1";
    doc["generator"] = "fhkam";
    doc["mode"] = "paper";
    doc["config"] = config_echo;
    doc["paper_family"] = toy_family_json(family);
    doc["result"] = toy_result_json(result);
    write_json(out / "result.json", doc);

    std::vector<StageTrace> traces = result.prep_stages;
    traces.insert(traces.end(), result.main_stages.begin(), result.main_stages.end());
    std::ofstream csv(out / "stages.csv", std::ios::binary);
    if (!csv) throw ConfigError("report_cli", "cannot write stages.csv");
    write_stages_csv(csv, traces);
    csv.close();

    std::printf("run-kam (paper): n_star = %d, n_bar = %d, %zu prep + %zu main stages\n",
                result.n_star, result.n_bar, result.prep_stages.size(),
                result.main_stages.size());
    std::printf("  log10 eps = %.2f (threshold %.2f), certificates %s\n", result.log10_eps,
                result.log10_eps_bar, result.all_certificates_pass ? "pass" : "FAIL");
    return result.all_certificates_pass ? 0 : 4;
}

int cmd_run_kam(const Options& opt) {
    if (opt.config_path.empty())
        throw ConfigError("report_cli", "run-kam needs --config (or FHKAM_CONFIG)");
    Json raw = load_json(opt.config_path);
    require_keys(raw, "config",
                 {"mode", "epsilon", "L", "M", "T", "aleph", "delta", "n_start", "n_max",
                  "step_limit", "global_fourier_cap", "taylor_cap", "target_residual",
                  "quad_samples", "circle_samples", "trim_floor", "family", "paper_family",
                  "main_stages"});
    Json cfg_part = raw;
    cfg_part.erase("family");
    cfg_part.erase("paper_family");
    cfg_part.erase("main_stages");
    EngineConfig config = config_from(cfg_part, "config");
    if (!opt.mode.empty())
        config.mode = opt.mode == "paper" ? EngineMode::paper_faithful : EngineMode::adaptive;
    return config.mode == EngineMode::adaptive ? run_adaptive(opt, raw, config)
                                               : run_paper(opt, raw, config);
}

// ---------- verify-curve ----------

int cmd_verify_curve(const Options& opt) {
    FiberedJet jet = jet_from(load_json(opt.jet_path), "jet");
    Json cj = load_json(opt.curve_path);
    StripFunction curve = cj.is_object() && cj.contains("curve")
                              ? strip_from(cj.at("curve"), "curve.curve")
                              : strip_from(cj, "curve");

    double residual = invariance_residual(jet, curve, opt.verify_samples);
    double rotation = fibered_rotation_number(jet, curve, opt.verify_samples);
    double defect = indifference_defect(jet, curve, opt.verify_samples);
    double beta_frac = to_double(jet.beta - floor(jet.beta));
    double d = rotation - beta_frac;
    double rotation_error = std::abs(d - std::round(d));

    bool residual_ok = residual <= opt.residual_target;
    bool rotation_ok = rotation_error <= opt.rotation_target;
    bool defect_ok = defect <= opt.defect_target;
    bool pass = residual_ok && rotation_ok && defect_ok;

    Json out;
    out["schema"] = "fhkam-verify/1";
    out["jet"] = opt.jet_path;
    out["curve"] = opt.curve_path;
    out["samples"] = opt.verify_samples;
    out["residual"] = residual;
    out["residual_target"] = opt.residual_target;
    out["residual_ok"] = residual_ok;
    out["rotation"] = rotation;
    out["rotation_error"] = rotation_error;
    out["rotation_target"] = opt.rotation_target;
    out["rotation_ok"] = rotation_ok;
    out["defect"] = defect;
    out["defect_target"] = opt.defect_target;
    out["defect_ok"] = defect_ok;
    out["pass"] = pass;
    write_json(fs::path(opt.out_dir) / "verify.json", out);

    std::printf("verify-curve: residual %.3e, rotation error %.3e, defect %.3e: %s\n", residual,
                rotation_error, defect, pass ? "pass" : "FAIL");
    return pass ? 0 : 4;
}

// ---------- dispatch ----------

template <typename Fn>
int guarded(const Options& opt, Fn&& fn) {
    try {
        fs::create_directories(opt.out_dir);
        return fn();
    } catch (const Error& e) {
        Json err;
        err["schema"] = error_schema;
        err["module"] = e.module();
        err["code"] = e.code();
        err["message"] = e.what();
        try {
            write_json(fs::path(opt.out_dir) / "error.json", err);
        } catch (...) {
        }
        std::fprintf(stderr, "error [%s/%s]: %s\n", e.module().c_str(), e.code().c_str(),
                     e.what());
        bool config_class = dynamic_cast<const ConfigError*>(&e) != nullptr ||
                            dynamic_cast<const RationalPair*>(&e) != nullptr;
        return config_class ? 2 : 3;
    } catch (const std::exception& e) {
        Json err;
        err["schema"] = error_schema;
        err["module"] = "report_cli";
        err["code"] = "unexpected";
        err["message"] = e.what();
        try {
            write_json(fs::path(opt.out_dir) / "error.json", err);
        } catch (...) {
        }
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"staged construction of indifferent invariant curves for fibered "
                 "holomorphic maps"};
    app.require_subcommand(1);

    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON configuration file")
            ->envname("FHKAM_CONFIG");
        sub->add_option("--out", opt.out_dir, "output directory (default .)")
            ->envname("FHKAM_OUT");
        sub->add_option("--precision-bits", opt.precision_bits,
                        "working precision in bits (default 256)")
            ->envname("FHKAM_PRECISION_BITS");
        sub->add_option("--seed", opt.seed, "seed for generated test data (default 12345)")
            ->envname("FHKAM_SEED");
    };

    CLI::App* arith =
        app.add_subcommand("arith", "continued fractions, worst divisors, partial sums");
    add_common(arith);
    CLI::App* schedule =
        app.add_subcommand("schedule", "stage schedule tables and their inequalities");
    add_common(schedule);
    CLI::App* cohomology = app.add_subcommand(
        "cohomology-test", "randomized residual checks of the truncated solvers");
    add_common(cohomology);
    CLI::App* runkam = app.add_subcommand("run-kam", "run the staged construction");
    add_common(runkam);
    runkam->add_option("--mode", opt.mode, "paper or adaptive (overrides the config)")
        ->envname("FHKAM_MODE")
        ->check(CLI::IsMember({"paper", "adaptive"}));
    runkam->add_flag("--resume", opt.resume,
                     "continue from checkpoint.json in the output directory");
    CLI::App* verify =
        app.add_subcommand("verify-curve", "recompute the invariance defects of a stored curve");
    add_common(verify);
    verify->add_option("--jet", opt.jet_path, "fibered jet JSON file")->required();
    verify->add_option("--curve", opt.curve_path, "curve JSON file")->required();
    verify->add_option("--samples", opt.verify_samples, "quadrature samples (default 4096)");
    verify->add_option("--residual-target", opt.residual_target,
                       "invariance residual bound (default 1e-10)");
    verify->add_option("--rotation-target", opt.rotation_target,
                       "rotation error bound (default 1e-8)");
    verify->add_option("--defect-target", opt.defect_target,
                       "indifference defect bound (default 1e-8)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    set_precision_bits(opt.precision_bits);
    if (app.got_subcommand(arith)) return guarded(opt, [&] { return cmd_arith(opt); });
    if (app.got_subcommand(schedule)) return guarded(opt, [&] { return cmd_schedule(opt); });
    if (app.got_subcommand(cohomology)) return guarded(opt, [&] { return cmd_cohomology(opt); });
    if (app.got_subcommand(runkam)) return guarded(opt, [&] { return cmd_run_kam(opt); });
    if (app.got_subcommand(verify)) return guarded(opt, [&] { return cmd_verify_curve(opt); });
    return 2;
}
