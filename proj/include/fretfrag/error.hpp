#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fretfrag {

/// 1-based source location range. `file` may be empty for in-memory text.
struct SourceSpan {
  std::string file;
  int startLine = 1;
  int startCol = 1;
  int endLine = 1;
  int endCol = 1;

  std::string to_string() const;
};

enum class ErrorKind {
  Parse,
  UnknownFragment,
  CyclicFragment,
  DuplicateId,
  UnknownParent,
  NameClash,
  MissingAtom,
  UnsupportedScope,
  MergeConflict,
  FragmentNotConditionOnly,
  NoMatch,
  NameCollision,
  AtomBudgetExceeded,
  IdMismatch,
  UnknownRequirement,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

/// Every library failure is reported through this exception. `details`
/// carries the structured payload of the error (cycle path, conflicting
/// sources, mismatched ids, ...) in a kind-specific order.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message,
        std::optional<SourceSpan> span = std::nullopt,
        std::vector<std::string> details = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<SourceSpan>& span() const noexcept { return span_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

  /// "file:line:col: error[kind]: message"
  std::string render() const;

 private:
  ErrorKind kind_;
  std::optional<SourceSpan> span_;
  std::vector<std::string> details_;
};

}  // namespace fretfrag
