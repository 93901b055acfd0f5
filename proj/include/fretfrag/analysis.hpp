#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fretfrag/model.hpp"

namespace fretfrag {

/// One piece of repeated requirement material.
struct DupPart {
  enum class Kind { Subexpression, Clause, Timing, Response };

  Kind kind = Kind::Subexpression;
  BoolExpr expr;  // normalized; Subexpression, Clause and Response (one conjunct)
  ConditionClause::Keyword keyword = ConditionClause::Keyword::If;  // Clause only
  Timing timing;  // normalized; Timing only

  std::string text() const;
  std::size_t size() const;
  bool operator==(const DupPart& other) const { return kind == other.kind && text() == other.text(); }
};

const char* to_string(DupPart::Kind kind);

struct DupCandidate {
  std::vector<DupPart> parts;          // maximal items sharing the support set
  std::vector<DupPart> subsumed;       // items with the same support nested inside a part
  std::vector<std::string> support;    // requirement ids, in set order
  std::size_t size = 0;                // total node count of `parts`

  std::string text() const;  // parts joined by "; "
};

struct DupOptions {
  int min_support = 2;
  bool include_responses = false;
  /// Candidates made of a single identifier atom need at least this support.
  int lone_atom_support = 4;
};

/// Mines repeated condition subexpressions, whole condition clauses and
/// timings across the requirements of `set` (fragments are not mined);
/// response conjuncts too when `include_responses` is set.
/// Items with an identical support set are grouped into one candidate.
/// Sorted by support descending, size descending, then text.
std::vector<DupCandidate> find_duplicates(const RequirementSet& set, const DupOptions& opts = {});

/// True when requirement `r` contains `part` (used as an independent re-scan).
bool requirement_contains(const Requirement& r, const DupPart& part);

struct DependencyGraph {
  std::vector<std::string> requirements;  // set order
  std::vector<std::string> fragments;     // set order
  std::vector<std::pair<std::string, std::string>> edges;  // "depends on", deduplicated

  std::string to_dot() const;
};

/// Edge r -> f for each uses entry or inline reference in r, f -> g for each
/// reference inside fragment f.
DependencyGraph dependency_graph(const RequirementSet& set);

/// Requirements that transitively reach `fragment`, in set order.
/// Throws Error(UnknownFragment).
std::vector<std::string> impact(const RequirementSet& set, const std::string& fragment);

struct ApplyResult {
  RequirementSet set;
  std::vector<std::string> log;
  std::vector<std::string> created;  // fragment names, in creation order
};

/// Extracts each candidate (largest first) into a fragment named
/// `<prefix><n>`. Candidates that no longer match are skipped and logged.
ApplyResult apply_duplicates(const RequirementSet& set, const std::vector<DupCandidate>& candidates,
                             const std::string& prefix);

}  // namespace fretfrag
