#pragma once

#include <string>
#include <vector>

#include "fretfrag/model.hpp"

namespace fretfrag {

/// Two or more contributors to one requirement carry a timing (or scope).
/// Conflicts are never resolved by summing or precedence.
struct MergeConflict {
  enum class Kind { Timing, Scope };
  Kind kind = Kind::Timing;
  std::vector<std::string> sources;  // requirement id and/or fragment names
  std::string context;               // requirement being combined
};

class MergeConflictError : public Error {
 public:
  explicit MergeConflictError(MergeConflict conflict,
                              std::optional<SourceSpan> span = std::nullopt);
  const MergeConflict& conflict() const noexcept { return conflict_; }

 private:
  MergeConflict conflict_;
};

/// Inlines every fragment contribution into `req`:
///  - scope: the unique non-global scope among contributors, else global;
///  - conditions: req's clauses, then each used fragment's clauses in
///    reference order (depth-first, each fragment once);
///  - inline `@f` references: replaced by the conjunction of f's clause
///    expressions (f must contribute conditions only);
///  - timing: the unique non-default timing, else default;
///  - response: req's response conjoined with every fragment response.
/// Throws MergeConflictError, or Error(FragmentNotConditionOnly |
/// UnknownFragment).
Requirement combine_templates(const Requirement& req, const RequirementSet& set);

/// Every requirement replaced by its combined form; fragments dropped.
RequirementSet inline_all(const RequirementSet& set);

struct ExtractionSpec {
  std::string fragment_name;
  /// Material to extract. A body made of a single condition clause is
  /// matched first as a whole clause and otherwise as a subexpression
  /// (replaced in place by `@name`). Any other body is matched part by
  /// part: whole clauses, uses entries, timing, scope and response
  /// conjuncts, all of which must be present in every target.
  Fragment body;
  std::vector<std::string> targets;
};

/// Adds the fragment and rewrites each target to reference it. Matching
/// uses normalized structural equality. Non-target requirements are left
/// untouched. Throws Error(NoMatch) naming the first target lacking the
/// pattern (details: {id, part}), Error(NameCollision),
/// Error(UnknownRequirement) or Error(UnknownFragment).
RequirementSet extract_fragment(const RequirementSet& set, const ExtractionSpec& spec);

}  // namespace fretfrag
