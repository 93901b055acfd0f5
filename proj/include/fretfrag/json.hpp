#pragma once

#include <json.hpp>

#include "fretfrag/analysis.hpp"
#include "fretfrag/equivalence.hpp"
#include "fretfrag/model.hpp"
#include "fretfrag/refactor.hpp"

namespace fretfrag {

// Objects use nlohmann::json's sorted keys, so dump() output is stable under
// parse/dump round trips. Ordered collections are arrays.

nlohmann::json to_json(const SourceSpan& span);
nlohmann::json to_json(const BoolExpr& e);
nlohmann::json to_json(const Timing& t);
nlohmann::json to_json(const Scope& s);
nlohmann::json to_json(const Requirement& r);
nlohmann::json to_json(const Fragment& f);
nlohmann::json to_json(const RequirementSet& set);

nlohmann::json to_json(const Error& e);
nlohmann::json to_json(const Trace& t);
nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const RefactorReport& report);

nlohmann::json to_json(const DupPart& p);
nlohmann::json to_json(const DupCandidate& c);
nlohmann::json to_json(const std::vector<DupCandidate>& candidates);
nlohmann::json to_json(const DependencyGraph& g);

}  // namespace fretfrag
