#include "fretfrag/error.hpp"

namespace fretfrag {

std::string SourceSpan::to_string() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  out += ':' + std::to_string(startLine) + ':' + std::to_string(startCol);
  return out;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::UnknownFragment: return "UnknownFragment";
    case ErrorKind::CyclicFragment: return "CyclicFragment";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownParent: return "UnknownParent";
    case ErrorKind::NameClash: return "NameClash";
    case ErrorKind::MissingAtom: return "MissingAtom";
    case ErrorKind::UnsupportedScope: return "UnsupportedScope";
    case ErrorKind::MergeConflict: return "MergeConflict";
    case ErrorKind::FragmentNotConditionOnly: return "FragmentNotConditionOnly";
    case ErrorKind::NoMatch: return "NoMatch";
    case ErrorKind::NameCollision: return "NameCollision";
    case ErrorKind::AtomBudgetExceeded: return "AtomBudgetExceeded";
    case ErrorKind::IdMismatch: return "IdMismatch";
    case ErrorKind::UnknownRequirement: return "UnknownRequirement";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

Error::Error(ErrorKind kind, std::string message, std::optional<SourceSpan> span,
             std::vector<std::string> details)
    : std::runtime_error(std::move(message)),
      kind_(kind),
      span_(std::move(span)),
      details_(std::move(details)) {}

std::string Error::render() const {
  std::string out;
  if (span_) out += span_->to_string() + ": ";
  out += "error[";
  out += fretfrag::to_string(kind_);
  out += "]: ";
  out += what();
  return out;
}

}  // namespace fretfrag
