#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fretfrag/model.hpp"

namespace fretfrag {

/// Finite sequence of truth assignments. steps[t][i] is the value of
/// atoms[i] at tick t.
class Trace {
 public:
  /// Throws Error(InvalidArgument) on an empty trace or ragged steps.
  Trace(std::vector<Atom> atoms, std::vector<std::vector<bool>> steps);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<std::vector<bool>>& steps() const noexcept { return steps_; }
  int length() const noexcept { return static_cast<int>(steps_.size()); }

  std::optional<std::size_t> index_of(const std::string& atom_text) const;
  /// Throws Error(MissingAtom).
  bool value(const Atom& atom, int tick) const;

  /// One line per atom: "name: 0 1 1".
  std::string to_text() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<std::vector<bool>> steps_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Value of an inlined expression at one tick. FragmentRef is rejected
/// with Error(InvalidArgument); unknown atoms with Error(MissingAtom).
bool eval(const BoolExpr& e, const Trace& trace, int tick);

/// Half-open tick interval [begin, end).
struct Interval {
  int begin = 0;
  int end = 0;
  bool operator==(const Interval&) const = default;
};

/// Scope segments of a trace of length n. `mode_truth` holds the value of
/// the scope mode per tick (ignored for Global).
std::vector<Interval> segments(const Scope& scope, const std::vector<bool>& mode_truth, int n);

/// Ticks in `segment` where the condition conjunction rises (or the segment
/// start when there are no conditions).
std::vector<int> triggers(std::span<const ConditionClause> conditions, Interval segment,
                          const Trace& trace);

/// Whether the timing obligation spawned at `trigger` is met inside `segment`.
bool obligation_holds(const Timing& timing, const BoolExpr& response, int trigger,
                      Interval segment, const Trace& trace);

/// Reference semantics of an inlined requirement: every trigger of every
/// scope segment meets its obligation. Throws Error(MissingAtom) when the
/// trace lacks an atom of the requirement.
bool evaluate(const Requirement& req, const Trace& trace);

// ---------------------------------------------------------------------------
// Temporal formulas
// ---------------------------------------------------------------------------

enum class LtlKind {
  Atom,
  True,
  False,
  Not,
  And,
  Or,
  Implies,
  Next,
  Globally,
  Finally,
  Until,
  WeakUntil,
  BoundedFinally,
  BoundedGlobally,
};

class LtlFormula {
 public:
  static LtlFormula atom(Atom a);
  static LtlFormula constant(bool value);
  static LtlFormula negate(LtlFormula f);
  static LtlFormula conjunction(std::vector<LtlFormula> operands);
  static LtlFormula disjunction(std::vector<LtlFormula> operands);
  static LtlFormula implies(LtlFormula lhs, LtlFormula rhs);
  static LtlFormula next(LtlFormula f);
  static LtlFormula globally(LtlFormula f);
  static LtlFormula finally(LtlFormula f);
  static LtlFormula until(LtlFormula lhs, LtlFormula rhs);
  static LtlFormula weak_until(LtlFormula lhs, LtlFormula rhs);
  static LtlFormula bounded_finally(int bound, LtlFormula f);
  static LtlFormula bounded_globally(int bound, LtlFormula f);

  /// Literal translation of an (inlined) boolean expression.
  static LtlFormula from_expr(const BoolExpr& e);

  LtlKind kind() const noexcept;
  const Atom& atom() const;
  int bound() const noexcept;
  std::span<const LtlFormula> children() const noexcept;

  bool operator==(const LtlFormula& other) const;

 private:
  struct Node;
  explicit LtlFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Conventional syntax: G F X U W F<=n G<=n & | ! ->.
std::string to_text(const LtlFormula& f);

/// (C -> T) & G((!C & X C) -> X T), or T when the requirement has no
/// conditions. Throws Error(UnsupportedScope) for non-global scopes and
/// Error(InvalidArgument) if fragment references remain.
LtlFormula to_ltl(const Requirement& req);

/// Finite-trace semantics with strong next; bounded operators clip to the
/// trace end (F<=n strictly, G<=n leniently).
bool eval_ltl(const LtlFormula& f, const Trace& trace, int position);

// ---------------------------------------------------------------------------
// Bit-parallel evaluation
// ---------------------------------------------------------------------------

/// Requirement compiled against a fixed atom order, evaluated on traces
/// packed as one tick mask per atom (bit t = value at tick t). Implements
/// the same semantics as evaluate() for traces of at most 64 ticks; used by
/// the equivalence checker's enumeration loop.
class CompiledRequirement {
 public:
  /// `atoms` fixes the meaning of mask indices. Throws Error(MissingAtom)
  /// if the requirement uses an atom outside `atoms`.
  CompiledRequirement(const Requirement& req, const std::vector<Atom>& atoms);

  bool evaluate(std::span<const std::uint64_t> atom_masks, int length) const;

 private:
  struct Op {
    enum class Code : std::uint8_t { Load, Not, And, Or, Implies } code;
    std::uint32_t arg;  // atom index for Load, operand count for And/Or
  };
  using Program = std::vector<Op>;

  static void compile(const BoolExpr& e, const std::unordered_map<std::string, std::size_t>& index,
                      Program& out);
  static std::uint64_t run(const Program& p, std::span<const std::uint64_t> masks,
                           std::uint64_t all);

  Scope::Kind scope_kind_;
  std::size_t mode_index_ = 0;
  std::optional<Program> condition_;
  Timing::Kind timing_;
  int ticks_ = 0;
  std::optional<Program> stop_;
  Program response_;
};

/// Packs a trace into per-atom tick masks in the trace's atom order.
std::vector<std::uint64_t> pack(const Trace& trace);

}  // namespace fretfrag
