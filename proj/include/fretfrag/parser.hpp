#pragma once

#include <string>
#include <string_view>

#include "fretfrag/model.hpp"

namespace fretfrag {

/// Parses a `.fret` file. The result satisfies every set invariant (see
/// validate()); the first error aborts with Error(Parse | UnknownFragment |
/// CyclicFragment | DuplicateId | ...).
///
///   file            := (fragmentDecl | requirementDecl)*
///   requirementDecl := "requirement" ID ("parent" ID)? "{" scope? item*
///                      ID "shall" timing? ("satisfy")? "(" expr ")" "}"
///   fragmentDecl    := "fragment" ID "{" scope? item* timing?
///                      ("satisfy" "(" expr ")")? "}"
///   item            := ("when" | "if") "(" expr ")" | "@" ID
///   scope           := ("in" | "before" | "after") ID
///   timing          := "immediately" | "always" | "never" | "eventually"
///                    | "until" "(" expr ")" | ("within" | "for") INT "ticks"
///   expr            := precedence ! > & > | > => (right associative)
///
/// `#` starts a comment running to end of line. Comment lines directly
/// before a declaration are kept as its notes.
RequirementSet parse(std::string_view text, std::string_view file = {});

/// Parses exactly one fragment declaration without resolving its
/// references against any set (used for extraction patterns).
Fragment parse_fragment(std::string_view text, std::string_view file = {});

/// Parses a standalone boolean expression.
BoolExpr parse_expr(std::string_view text);

/// Canonical text: fragments first, then requirements, both in set order;
/// two-space indentation, LF line endings, one blank line between
/// declarations. parse(print(s)) == s.
std::string print(const RequirementSet& set);
std::string print(const Requirement& r);
std::string print(const Fragment& f);

}  // namespace fretfrag
