#pragma once

#include <stdexcept>
#include <string>

namespace fhkam {

// Base for every typed failure.  `module` records where the condition was
// detected (used for provenance in error reports), `code` is a stable
// machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string code, const std::string& message)
        : std::runtime_error(message), module_(std::move(module)), code_(std::move(code)) {}

    const std::string& module() const { return module_; }
    const std::string& code() const { return code_; }

private:
    std::string module_;
    std::string code_;
};

// Continued-fraction expansion ran out of input precision before reaching the
// requested depth.  `safe_depth` is the largest depth certified by the floor.
class PrecisionExhausted : public Error {
public:
    PrecisionExhausted(std::string module, const std::string& message, int safe_depth)
        : Error(std::move(module), "precision-exhausted", message), safe_depth_(safe_depth) {}
    int safe_depth() const { return safe_depth_; }

private:
    int safe_depth_;
};

// A table or expansion does not reach far enough for the requested query.
class DepthInsufficient : public Error {
public:
    DepthInsufficient(std::string module, const std::string& message)
        : Error(std::move(module), "depth-insufficient", message) {}
};

// (alpha, beta) resonant: some |k| <= k_max has ||k*alpha - beta|| below the floor.
class RationalPair : public Error {
public:
    RationalPair(std::string module, const std::string& message, long long k)
        : Error(std::move(module), "rational-pair", message), k_(k) {}
    long long k() const { return k_; }

private:
    long long k_;
};

// A cohomological divisor fell below the resonance floor.
class ResonanceError : public Error {
public:
    ResonanceError(std::string module, const std::string& message, long long mode, double dist)
        : Error(std::move(module), "resonance", message), mode_(mode), dist_(dist) {}
    long long mode() const { return mode_; }
    double dist() const { return dist_; }

private:
    long long mode_;
    double dist_;
};

class NonzeroMean : public Error {
public:
    NonzeroMean(std::string module, const std::string& message)
        : Error(std::move(module), "nonzero-mean", message) {}
};

// Generic precondition violation on operation inputs.
class DomainViolation : public Error {
public:
    DomainViolation(std::string module, std::string code, const std::string& message)
        : Error(std::move(module), std::move(code), message) {}
};

// log/exp branch guard: argument too large for the principal branch to be safe.
class BranchViolation : public Error {
public:
    BranchViolation(std::string module, const std::string& message)
        : Error(std::move(module), "branch-violation", message) {}
};

// Winding number of a parameter loop is not the single simple zero expected.
class WindingError : public Error {
public:
    WindingError(std::string module, const std::string& message, long long winding)
        : Error(std::move(module), "winding", message), winding_(winding) {}
    long long winding() const { return winding_; }

private:
    long long winding_;
};

class ConfigError : public Error {
public:
    ConfigError(std::string module, const std::string& message)
        : Error(std::move(module), "config", message) {}
};

// A run-time check mandated by the staged algorithm failed (these are hard
// failures in strict mode: the certified bound the stage relies on is false).
class StageAssertion : public Error {
public:
    StageAssertion(std::string module, const std::string& message)
        : Error(std::move(module), "stage-assertion", message) {}
};

class ConvergenceError : public Error {
public:
    ConvergenceError(std::string module, const std::string& message)
        : Error(std::move(module), "no-convergence", message) {}
};

} // namespace fhkam
