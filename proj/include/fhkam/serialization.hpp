#pragma once

#include "fhkam/kam_engine.hpp"
#include "fhkam/paper_mode.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fhkam {

// Insertion-ordered JSON so emitted documents read in declaration order.
// Dumping is deterministic: identical values give identical bytes.
using Json = nlohmann::ordered_json;

// Every *_from parser is strict: a key outside the schema, a missing
// required key, or a wrong type throws ConfigError naming the full path of
// the offending entry.  Real-valued fields accept a decimal string (parsed
// at the current working precision; the spellings "golden" and "sqrt2-1"
// denote (sqrt(5)-1)/2 and sqrt(2)-1), a JSON number, or a list of positive
// integers read as continued-fraction partial quotients.

Json complex_json(Complex z);
Complex complex_from(const Json& j, const std::string& path);

Json real_json(const Real& x); // decimal string, round-trips exactly
Real real_from(const Json& j, const std::string& path);

Json strip_json(const StripFunction& f);
StripFunction strip_from(const Json& j, const std::string& path);

Json jet_json(const FiberedJet& F);
FiberedJet jet_from(const Json& j, const std::string& path);

Json family_json(const ParamFamily& family);
ParamFamily family_from(const Json& j, const std::string& path);

Json config_json(const EngineConfig& config);
EngineConfig config_from(const Json& j, const std::string& path);

Json plan_json(const StagePlan& plan);
StagePlan plan_from(const Json& j, const std::string& path);

Json step_trace_json(const StepTrace& step);
StepTrace step_trace_from(const Json& j, const std::string& path);

Json stage_trace_json(const StageTrace& trace);
StageTrace stage_trace_from(const Json& j, const std::string& path);

Json hypothesis_json(const HypothesisReport& report);
HypothesisReport hypothesis_from(const Json& j, const std::string& path);

Json prep_report_json(const PreparationReport& prep);
PreparationReport prep_report_from(const Json& j, const std::string& path);

Json state_json(const EngineState& state);
EngineState state_from(const Json& j, const std::string& path);

Json result_json(const KamResult& result);

Json lc_json(const LogComplex& a);
LogComplex lc_from_json(const Json& j, const std::string& path);

Json toy_family_json(const ToyFamily& family);
ToyFamily toy_family_from(const Json& j, const std::string& path);

Json toy_result_json(const ToyResult& result);

// One row per (n, i): rows of kind "step" record each translation step's
// certified sizes, and the closing row of kind "stage" at i = i_n records the
// multiplier split, certificates, and parameter correction.  Norms are
// decimal logs of certified bounds; cells that do not apply stay empty.
void write_stages_csv(std::ostream& out, const std::vector<StageTrace>& traces);

// strict schema gate shared by the parsers and the CLI config reader
void require_keys(const Json& j, const std::string& path,
                  std::initializer_list<const char*> allowed);

} // namespace fhkam
