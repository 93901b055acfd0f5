#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fretfrag/error.hpp"

namespace fretfrag {

// ---------------------------------------------------------------------------
// Atoms and terms
// ---------------------------------------------------------------------------

enum class RelOp { Lt, Le, Gt, Ge, Eq, Ne };

const char* to_string(RelOp op);

/// Arithmetic-looking term inside a comparison atom. Terms are never
/// interpreted; they only contribute to the atom's canonical text.
/// Add/Sub chains are left-associative: args[1] is never Add/Sub.
struct Term {
  enum class Kind { Identifier, Number, Apply, Add, Sub };

  Kind kind = Kind::Identifier;
  std::string name;  // identifier, number literal or applied function name
  std::vector<Term> args;

  static Term identifier(std::string name);
  static Term number(std::string literal);
  static Term apply(std::string function, std::vector<Term> args);
  static Term add(Term lhs, Term rhs);
  static Term sub(Term lhs, Term rhs);

  std::string to_text() const;
  bool operator==(const Term&) const = default;
};

struct Comparison {
  Term lhs;
  RelOp op = RelOp::Eq;
  Term rhs;
  bool operator==(const Comparison&) const = default;
};

/// Opaque atomic predicate. Two atoms are equal iff their canonical
/// texts are equal.
class Atom {
 public:
  enum class Kind { Identifier, Comparison };

  /// Throws Error(InvalidArgument) if `name` is not a plain identifier.
  static Atom identifier(std::string name);
  static Atom comparison(Term lhs, RelOp op, Term rhs);

  Kind kind() const noexcept { return kind_; }
  bool is_identifier() const noexcept { return kind_ == Kind::Identifier; }
  const std::string& text() const noexcept { return text_; }
  const Comparison& comparison() const { return *comparison_; }

  bool operator==(const Atom& other) const noexcept { return text_ == other.text_; }
  std::strong_ordering operator<=>(const Atom& other) const noexcept {
    return text_ <=> other.text_;
  }

 private:
  Atom() = default;
  Kind kind_ = Kind::Identifier;
  std::string text_;
  std::optional<Comparison> comparison_;
};

bool is_identifier(std::string_view text);

// ---------------------------------------------------------------------------
// Boolean expressions
// ---------------------------------------------------------------------------

enum class ExprKind { Atom, FragmentRef, Not, And, Or, Implies };

/// Immutable boolean expression tree with shared structure. Equality is
/// structural and ignores source spans.
class BoolExpr {
 public:
  /// Empty expression; only valid as a placeholder to be assigned over.
  BoolExpr() = default;

  static BoolExpr atom(Atom a, std::optional<SourceSpan> span = std::nullopt);
  static BoolExpr ref(std::string fragment, std::optional<SourceSpan> span = std::nullopt);
  static BoolExpr negate(BoolExpr e, std::optional<SourceSpan> span = std::nullopt);
  /// A single operand is returned unchanged; an empty list is an error.
  static BoolExpr conjunction(std::vector<BoolExpr> operands,
                              std::optional<SourceSpan> span = std::nullopt);
  static BoolExpr disjunction(std::vector<BoolExpr> operands,
                              std::optional<SourceSpan> span = std::nullopt);
  static BoolExpr implies(BoolExpr lhs, BoolExpr rhs,
                          std::optional<SourceSpan> span = std::nullopt);

  bool empty() const noexcept { return node_ == nullptr; }
  ExprKind kind() const noexcept;
  const Atom& atom() const;
  const std::string& ref_name() const;
  std::span<const BoolExpr> children() const noexcept;
  const std::optional<SourceSpan>& span() const noexcept;

  bool operator==(const BoolExpr& other) const;

 private:
  struct Node;
  explicit BoolExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Canonical textual rendering (the same text the `.fret` printer emits).
std::string to_text(const BoolExpr& e);

/// Flattens And/Or, drops duplicate operands, orders operands by
/// (canonical hash, canonical text), rewrites implication as disjunction
/// and removes double negation. The result is a fixed point.
BoolExpr normalize(const BoolExpr& e);

/// FNV-1a digest of the canonical text of normalize(e). Stable across runs.
std::uint64_t canonical_hash(const BoolExpr& e);

std::size_t node_count(const BoolExpr& e);

/// True if `needle` occurs as a subtree of `haystack` (structural equality).
bool contains_subtree(const BoolExpr& haystack, const BoolExpr& needle);

// ---------------------------------------------------------------------------
// Requirement fields
// ---------------------------------------------------------------------------

struct ConditionClause {
  enum class Keyword { When, If };
  Keyword keyword = Keyword::If;
  BoolExpr expr;
  bool operator==(const ConditionClause&) const = default;
};

const char* to_string(ConditionClause::Keyword keyword);

struct Scope {
  enum class Kind { Global, In, Before, After };
  Kind kind = Kind::Global;
  std::optional<Atom> mode;  // identifier atom, present unless Global

  static Scope global() { return {}; }
  static Scope in(Atom mode) { return {Kind::In, std::move(mode)}; }
  static Scope before(Atom mode) { return {Kind::Before, std::move(mode)}; }
  static Scope after(Atom mode) { return {Kind::After, std::move(mode)}; }

  bool is_global() const noexcept { return kind == Kind::Global; }
  std::string to_text() const;  // empty for Global
  bool operator==(const Scope&) const = default;
};

struct Timing {
  enum class Kind { Default, Immediately, Always, Never, Eventually, Until, Within, For };
  Kind kind = Kind::Default;
  std::optional<BoolExpr> stop;  // Until only
  int ticks = 0;                 // Within/For only, >= 1

  static Timing default_timing() { return {}; }
  static Timing of(Kind kind) { return {kind, std::nullopt, 0}; }
  static Timing until(BoolExpr stop) { return {Kind::Until, std::move(stop), 0}; }
  static Timing within(int ticks) { return {Kind::Within, std::nullopt, ticks}; }
  static Timing for_ticks(int ticks) { return {Kind::For, std::nullopt, ticks}; }

  bool is_default() const noexcept { return kind == Kind::Default; }
  std::string to_text() const;  // empty for Default
  bool operator==(const Timing&) const = default;
};

/// `@name` condition item of a requirement or fragment.
struct FragmentUse {
  std::string name;
  std::optional<SourceSpan> span;
  bool operator==(const FragmentUse& other) const { return name == other.name; }
};

struct Requirement {
  std::string id;
  std::optional<std::string> parent;
  Scope scope;
  std::vector<ConditionClause> conditions;
  std::vector<FragmentUse> uses;
  std::string component;
  Timing timing;
  BoolExpr response;
  std::vector<std::string> notes;  // leading `#` comment lines, without the `#`
  std::optional<SourceSpan> span;

  bool operator==(const Requirement& other) const;
};

struct Fragment {
  std::string name;
  Scope scope;
  std::vector<ConditionClause> conditions;
  std::vector<FragmentUse> uses;
  Timing timing;
  std::optional<BoolExpr> response;
  std::vector<std::string> notes;
  std::optional<SourceSpan> span;

  bool empty() const noexcept {
    return scope.is_global() && conditions.empty() && uses.empty() && timing.is_default() &&
           !response;
  }
  /// Contributes only conditions (directly and through its own uses is
  /// checked by the refactor module, which has the set at hand).
  bool contributes_only_conditions() const noexcept {
    return scope.is_global() && timing.is_default() && !response;
  }
  bool operator==(const Fragment& other) const;
};

/// Requirement with all condition clauses folded into one normalized `if`
/// clause and every expression normalized. Used for structural comparison
/// of requirements whose clause layout differs.
Requirement normalize(const Requirement& r);
Timing normalize(const Timing& t);

/// Atoms referenced by a requirement, keyed (and ordered) by canonical text.
std::map<std::string, Atom> atoms_of(const Requirement& r);
void collect_atoms(const BoolExpr& e, std::map<std::string, Atom>& out);

/// Fragment names referenced inline (`@name` inside expressions).
void collect_refs(const BoolExpr& e, std::vector<std::string>& out);

// ---------------------------------------------------------------------------
// Requirement sets
// ---------------------------------------------------------------------------

/// Insertion-ordered collection of requirements and fragments.
class RequirementSet {
 public:
  /// Throws Error(DuplicateId).
  void add(Requirement r);
  void add(Fragment f);
  /// Replaces the requirement with the same id; throws UnknownRequirement.
  void replace(Requirement r);

  const std::vector<Requirement>& requirements() const noexcept { return requirements_; }
  const std::vector<Fragment>& fragments() const noexcept { return fragments_; }

  const Requirement* find_requirement(std::string_view id) const;
  const Fragment* find_fragment(std::string_view name) const;
  /// Throws Error(UnknownRequirement).
  const Requirement& requirement(std::string_view id) const;

  std::vector<std::string> trailing_notes;

  bool operator==(const RequirementSet& other) const;

 private:
  std::vector<Requirement> requirements_;
  std::vector<Fragment> fragments_;
  std::unordered_map<std::string, std::size_t> requirement_index_;
  std::unordered_map<std::string, std::size_t> fragment_index_;
};

/// Checks the set-level invariants: references resolve, the fragment
/// graph is acyclic, parents exist, fragment names do not collide with
/// identifier atoms, fragments are non-empty. Throws the first violation.
void validate(const RequirementSet& set);

/// Identifier atoms and scope modes used anywhere in the set.
std::map<std::string, Atom> atoms_of(const RequirementSet& set);

}  // namespace fretfrag
