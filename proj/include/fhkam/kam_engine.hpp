#pragma once

#include "fhkam/fibered_map.hpp"
#include "fhkam/schedule.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace fhkam {

// One-parameter analytic family of fibered jets with polynomial t-dependence
// in the curve and multiplier components:
//   rho0_t = base.rho0 + sum_{j>=1} t^j rho0_poly[j-1]
//   rho1_t = base.rho1 + sum_{j>=1} t^j rho1_poly[j-1]
// Higher Taylor components do not depend on t.  Evaluation is coefficientwise
// and therefore exact for every t; the transversality derivative
// d/dt int rho1_t dtheta is a closed form in the coupling coefficients.
struct ParamFamily {
    FiberedJet base;
    std::vector<StripFunction> rho0_poly; // coefficient of t^j at index j-1
    std::vector<StripFunction> rho1_poly;
};

// the canonical transversal coupling: rho1_t = rho1 + t, rho0 fixed
ParamFamily linear_family(FiberedJet base);

FiberedJet family_jet(const ParamFamily& family, Complex t);
Complex family_rho1_mean(const ParamFamily& family, Complex t);
Complex transversality_derivative(const ParamFamily& family, Complex t);
// closed-form d^2/dt^2 int rho1_t dtheta (enters the coupling-size bound)
Complex transversality_second(const ParamFamily& family, Complex t);

enum class EngineMode { paper_faithful, adaptive };

struct EngineConfig {
    EngineMode mode = EngineMode::adaptive;
    Real epsilon = Real("1e-4"); // family size scale entering the hypothesis suite
    double L = 2;                // transversality window: 1/L < |d/dt int rho1| < L
    double M = 2;                // bound on |d^2_z rho| over the fiber disc
    double T = 1;                // bound on the t-coupling sizes
    Real aleph = Real(1000000);  // largeness constant of the schedule
    Real delta = Real("0.1");    // strip half-width of the family
    int n_start = 3;             // first stage: truncation order 2^n_start
    int n_max = 40;              // hard stage cap (and schedule depth)
    int step_limit = 64;         // translation steps allowed within one stage
    int global_fourier_cap = 512;
    int taylor_cap = 6;
    double target_residual = 1e-11;
    int quad_samples = 4096;     // rotation / defect / residual quadrature
    int circle_samples = 256;    // parameter-circle sample count
    double trim_floor = 1e-14;   // stage trim floor; sits above grid-composition noise
};

// per-translation-step record; norms are decimal logs of certified bounds
struct StepTrace {
    int n = 0;
    int i = 0;
    double log10_eta = 0; // certified size of rho0 entering the step
    double log10_u0 = 0;  // certified size of the solved translation
    double disc_radius = 0;
};

struct StageTrace {
    int n = 0;
    int trunc = 0;
    int i_n = 0;
    std::vector<StepTrace> steps;
    double log10_rho0_in = 0;
    double log10_rho0_out = 0;
    double log10_eta_stop = 0;     // threshold that ended the translation loop
    double log10_rho1_out = 0;
    double log10_drho1_out = 0;
    double log10_u1_dev = 0;       // certified size of u1 - 1
    Complex lambda_ratio{1, 0};    // multiplier drift lambda_n / lambda of the stage
    double measured_d2z = 0;       // certified |d^2_z rho| on the current disc
    double measured_dg = 0;        // |g'| of the parameter map at the stage center
    double strip_in = 0;
    double strip_out = 0;
    double disc_radius_end = 0;
    Complex t_center{0, 0};        // parameter center after the correction step
    double t_move = 0;             // distance the center moved
    double p_radius = 0;           // parameter-disc radius after the stage
    bool nesting_ok = true;        // new disc contained in the previous one
    double slack = 0;              // discarded coefficient mass accumulated so far
    // log-space certificates (filled by the schedule-faithful mode)
    double log10_w_next = 0;
    double log10_l_next = 0;
    bool cert_rho0_ok = true;
    bool cert_drho1_ok = true;
    bool cert_radius_ok = true;
};

struct HypothesisReport {
    struct Item {
        std::string name;
        double log10_value = 0;
        double log10_bound = 0;
        bool pass = true;
    };
    std::vector<Item> items;
    Complex delta0{0, 0};        // measured transversality derivative at the center
    bool transversal = true;     // the window 1/L < |delta0| < L holds
    bool all_pass = true;
};

// radius and budget constants of the preparation step.  Throws ConfigError
// when the discriminant of the radius formula is negative (epsilon too large
// for the given transversality window).
struct PrepConstants {
    Real W_nstar; // divisor growth weight M 2^n Gamma_pair(2^n) at n_start
    Real R_eps;   // admissible zero-search radius
    Real K_R;     // parameter-disc budget per unit epsilon
};
PrepConstants compute_prep_constants(const Real& epsilon, double L, double M, double T,
                                     const Real& delta, const Real& gamma_pair_nstar,
                                     int n_star, const Real& log_w_nstar);

struct PreparationReport {
    int n_bar = 0;            // first main-stage index
    Complex t_star{0, 0};     // center after the initial zero of t -> int rho1_t
    Complex delta0{0, 0};
    double zero_radius = 0;   // circle radius the zero finder settled on
    double log10_R_eps = 0;
    double log10_K_R = 0;
    bool r_eps_defined = false;
    std::vector<double> log10_W; // weights W_n for n = n_start .. n_bar
    HypothesisReport hypotheses;
};

// Construction rules of one stage, sufficient to replay it at any parameter:
// truncation order, translation-step count, whether the multiplier step runs,
// and the strip retag applied at the end.  The solved conjugacies themselves
// are absent on purpose: they depend on t and are recomputed from the jet.
struct StagePlan {
    int n = 0;
    int trunc = 1;
    int i_n = 0;
    bool linear_step = true;
    Real strip_out;
};

// Replayable progress of a run: everything a checkpoint needs.  `jet` is a
// cache of the stage jet at t_center and is reconstructed by replay when a
// checkpoint is resumed (jet_valid marks whether it is populated).
struct EngineState {
    std::vector<StagePlan> plans;
    Complex t_center{0, 0};
    double p_radius = 0;
    int next_n = 0;
    std::vector<StageTrace> traces;
    PreparationReport prep;
    FiberedJet jet;
    bool jet_valid = false;
};

struct KamResult {
    Complex t_bar{0, 0};
    InvariantCurve curve;     // invariant curve of the family map at t_bar
    StripFunction u1_product; // accumulated multiplier conjugacy (degree zero)
    FiberedJet final_jet;     // conjugated jet with rho0, rho1 below target
    double rotation = 0;
    double rotation_error = 0; // mod-1 distance to beta
    double residual = 0;       // sup of the invariance defect over the grid
    double defect = 0;         // indifference defect along the curve
    double sup_u = 0;          // sup of |curve| on the real line
    double lambda_drift = 0;   // |product of stage drifts - 1|
    bool u1_degree_zero = false;
    EngineState state;
};

// Certified size checks of the family at the disc center: rho0 and rho1
// against epsilon, d^2_z rho against M, the coupling sizes against T, and the
// transversality window against L.  Throws RationalPair when beta sits on the
// alpha-orbit; size violations only mark the report (the run entry point
// decides, per mode, which of them refuse).
HypothesisReport verify_hypotheses(const ParamFamily& family, const EngineConfig& config);

// Zero of an analytic map inside the circle |t - center| = radius, certified
// by winding number 1 along the sampled circle.  Extraction by the discrete
// residue formula; the derivative comes from the Fourier series of g along
// the circle, never from finite differences; Newton steps refine the zero to
// 1e-12 * radius, or to the numerical floor of g when the steps stop
// contracting inside the circle.  WindingError with winding 0 ("winding-zero", no zero
// inside) or winding > 1 ("winding-many", not simple).  Circle evaluations
// run concurrently and are reduced in fixed index order.
struct ZeroHit {
    Complex zero{0, 0};
    Complex derivative{0, 0}; // series estimate of g' near the zero
    double min_on_circle = 0; // conditioning diagnostic
};
ZeroHit find_parameter_zero(const std::function<Complex(Complex)>& g, Complex center,
                            double radius, int samples);

// Deterministic reconstruction of the jet after plans[0..upto) at parameter
// t: bit-identical on repeated calls.  When `accumulate` is set, the output
// carries the composed affine conjugacy (u0, u1) and the per-stage multiplier
// drifts.  Throws DomainViolation("log-overrun") when upto exceeds the log.
struct ReplayOutput {
    FiberedJet jet;
    AffineConjugacy conj;
    std::vector<Complex> lambda_ratios;
};
ReplayOutput replay(const ParamFamily& family, const EngineConfig& config,
                    const std::vector<StagePlan>& plans, std::size_t upto, Complex t,
                    bool accumulate = false);

// Hypothesis suite, then the initial parameter centering (zero of
// t -> int rho1_t dtheta by winding + residue on an adaptively sized circle).
EngineState prepare(const ParamFamily& family, const EngineConfig& config);

// One stage at the current center: truncated twisted translation steps until
// the stop rule fires, one multiplier step, the strip retag, then the
// parameter correction (zero of the stage-advanced rho1 mean, located by
// pipeline replay on a circle).  Appends the plan and trace, re-centers the
// state by replaying at the new parameter.
StageTrace run_stage(const ParamFamily& family, const EngineConfig& config, EngineState& state,
                     int n);

using StageCallback = std::function<void(const EngineState&)>;

// prepare + stages until the certified size of rho0 and the multiplier mean
// undercut the target, then final verification of the accumulated curve
// (residual, rotation number, indifference defect) against the family map.
// The callback fires after preparation and after every stage (checkpointing
// hook).  ConvergenceError if the stage cap is reached first.
KamResult run(const ParamFamily& family, const EngineConfig& config,
              const StageCallback& on_stage = {});

// continue a checkpointed run: replays the recorded plans to rebuild the
// stage jet, then proceeds exactly as run (same arithmetic, same result)
KamResult resume(const ParamFamily& family, const EngineConfig& config, EngineState state,
                 const StageCallback& on_stage = {});

} // namespace fhkam
