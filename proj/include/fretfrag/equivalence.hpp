#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fretfrag/model.hpp"
#include "fretfrag/semantics.hpp"

namespace fretfrag {

struct EquivConfig {
  enum class Mode {
    Exhaustive,
    Random,
    Auto,  // exhaustive within the atom budget, random sampling beyond it
  };

  static constexpr std::uint64_t kDefaultSeed = 0x5eedf2e7ULL;

  int max_len = 4;
  Mode mode = Mode::Exhaustive;
  std::uint64_t samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  int max_atoms_exhaustive = 5;
  /// Enumeration threads; 0 picks the hardware concurrency. The verdict
  /// does not depend on this value.
  unsigned workers = 1;
};

const char* to_string(EquivConfig::Mode mode);

struct Verdict {
  enum class Kind { BoundedEquivalent, NotEquivalent, SampledConsistent };

  Kind kind = Kind::BoundedEquivalent;
  EquivConfig::Mode mode = EquivConfig::Mode::Exhaustive;  // mode actually used
  std::uint64_t traces_checked = 0;
  std::vector<Atom> atoms;        // atom universe, ordered by canonical text
  std::optional<Trace> witness;   // NotEquivalent only
  bool left_value = false;
  bool right_value = false;

  bool passed() const noexcept { return kind != Kind::NotEquivalent; }
};

const char* to_string(Verdict::Kind kind);

/// One-line summary, followed by the witness for NotEquivalent.
std::string to_text(const Verdict& v);

/// Inlines both requirements against `set` and compares them on every
/// trace of length 1..max_len over the union of their atoms (exhaustive)
/// or on `samples` seeded random traces. Exhaustive enumeration visits
/// lengths in ascending order; within one length the trace index is read
/// as a binary counter whose least significant bit is (tick 0, atom 0),
/// then (tick 0, atom 1), ... The first differing trace is the witness.
/// Throws Error(AtomBudgetExceeded) for Exhaustive mode beyond the atom
/// budget, plus any inlining error.
Verdict equivalent(const Requirement& left, const Requirement& right, const RequirementSet& set,
                   const EquivConfig& cfg);

/// Same as equivalent() for requirements that are already inlined.
Verdict equivalent_inlined(const Requirement& left, const Requirement& right,
                           const EquivConfig& cfg);

/// Trace number `index` of length `length` in the exhaustive order.
Trace trace_at(const std::vector<Atom>& atoms, int length, std::uint64_t index);

struct RefactorReport {
  struct Entry {
    std::string id;
    Verdict verdict;
  };
  std::vector<Entry> entries;

  std::size_t failures() const;
  bool all_passed() const { return failures() == 0; }
};

/// Compares every requirement of `before` with the requirement of the same
/// id in `after`, each inlined against its own set. Throws Error(IdMismatch)
/// listing the ids present in only one set.
RefactorReport check_refactoring(const RequirementSet& before, const RequirementSet& after,
                                 const EquivConfig& cfg);

std::string to_text(const RefactorReport& report);

}  // namespace fretfrag
