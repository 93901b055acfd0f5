#include "fretfrag/refactor.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

namespace fretfrag {

namespace {

std::string describe_conflict(const MergeConflict& c) {
  std::string out = c.kind == MergeConflict::Kind::Timing ? "TimingConflict" : "ScopeConflict";
  out += " in requirement '" + c.context + "' between ";
  for (std::size_t i = 0; i < c.sources.size(); ++i) {
    if (i) out += i + 1 == c.sources.size() ? " and " : ", ";
    out += "'" + c.sources[i] + "'";
  }
  return out;
}

BoolExpr with_children(const BoolExpr& e, std::vector<BoolExpr> kids) {
  switch (e.kind()) {
    case ExprKind::Not: return BoolExpr::negate(std::move(kids[0]), e.span());
    case ExprKind::And: return BoolExpr::conjunction(std::move(kids), e.span());
    case ExprKind::Or: return BoolExpr::disjunction(std::move(kids), e.span());
    case ExprKind::Implies: return BoolExpr::implies(std::move(kids[0]), std::move(kids[1]), e.span());
    default: return e;
  }
}

std::string key_of(const BoolExpr& e) { return to_text(normalize(e)); }

// ---------------------------------------------------------------------------
// Inlining
// ---------------------------------------------------------------------------

class Inliner {
 public:
  Inliner(const RequirementSet& set, std::string context)
      : set_(set), context_(std::move(context)) {}

  BoolExpr expand(const BoolExpr& e) {
    switch (e.kind()) {
      case ExprKind::Atom: return e;
      case ExprKind::FragmentRef: return expand_ref(e.ref_name(), e.span());
      default: {
        std::vector<BoolExpr> kids;
        bool changed = false;
        for (const auto& c : e.children()) {
          kids.push_back(expand(c));
          changed = changed || !(kids.back() == c);
        }
        return changed ? with_children(e, std::move(kids)) : e;
      }
    }
  }

  const Fragment& fragment(const std::string& name, const std::optional<SourceSpan>& span) {
    const Fragment* f = set_.find_fragment(name);
    if (!f) {
      throw Error(ErrorKind::UnknownFragment, "unknown fragment '@" + name + "'", span, {name});
    }
    return *f;
  }

 private:
  BoolExpr expand_ref(const std::string& name, const std::optional<SourceSpan>& span) {
    const Fragment& f = fragment(name, span);
    if (!f.contributes_only_conditions()) {
      throw Error(ErrorKind::FragmentNotConditionOnly,
                  "fragment '" + name + "' contributes more than conditions and cannot be "
                  "referenced inside an expression (requirement '" + context_ + "')",
                  span, {name, context_});
    }
    std::vector<BoolExpr> parts;
    for (const auto& c : f.conditions) parts.push_back(expand(c.expr));
    for (const auto& u : f.uses) parts.push_back(expand_ref(u.name, u.span));
    return BoolExpr::conjunction(std::move(parts));
  }

  const RequirementSet& set_;
  std::string context_;
};

}  // namespace

MergeConflictError::MergeConflictError(MergeConflict conflict, std::optional<SourceSpan> span)
    : Error(ErrorKind::MergeConflict, describe_conflict(conflict), std::move(span),
            conflict.sources),
      conflict_(std::move(conflict)) {}

Requirement combine_templates(const Requirement& req, const RequirementSet& set) {
  Inliner inliner(set, req.id);

  // Fragments reached through `@f` items, depth-first, each once.
  std::vector<const Fragment*> contributors;
  std::unordered_set<std::string> seen;
  std::function<void(const FragmentUse&)> visit = [&](const FragmentUse& u) {
    if (!seen.insert(u.name).second) return;
    const Fragment& f = inliner.fragment(u.name, u.span);
    contributors.push_back(&f);
    for (const auto& next : f.uses) visit(next);
  };
  for (const auto& u : req.uses) visit(u);

  Requirement out = req;
  out.uses.clear();
  out.conditions.clear();
  for (const auto& c : req.conditions) out.conditions.push_back({c.keyword, inliner.expand(c.expr)});
  for (const Fragment* f : contributors) {
    for (const auto& c : f->conditions) {
      out.conditions.push_back({c.keyword, inliner.expand(c.expr)});
    }
  }

  std::vector<std::string> scope_sources;
  std::vector<std::string> timing_sources;
  if (!req.scope.is_global()) scope_sources.push_back(req.id);
  if (!req.timing.is_default()) timing_sources.push_back(req.id);
  for (const Fragment* f : contributors) {
    if (!f->scope.is_global()) {
      scope_sources.push_back(f->name);
      out.scope = f->scope;
    }
    if (!f->timing.is_default()) {
      timing_sources.push_back(f->name);
      out.timing = f->timing;
    }
  }
  if (scope_sources.size() >= 2) {
    throw MergeConflictError({MergeConflict::Kind::Scope, scope_sources, req.id}, req.span);
  }
  if (timing_sources.size() >= 2) {
    throw MergeConflictError({MergeConflict::Kind::Timing, timing_sources, req.id}, req.span);
  }
  if (out.timing.stop) out.timing.stop = inliner.expand(*out.timing.stop);

  std::vector<BoolExpr> responses{inliner.expand(req.response)};
  for (const Fragment* f : contributors) {
    if (f->response) responses.push_back(inliner.expand(*f->response));
  }
  out.response = BoolExpr::conjunction(std::move(responses));
  return out;
}

RequirementSet inline_all(const RequirementSet& set) {
  RequirementSet out;
  for (const auto& r : set.requirements()) out.add(combine_templates(r, set));
  out.trailing_notes = set.trailing_notes;
  return out;
}

// ---------------------------------------------------------------------------
// Extract Fragment
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void no_match(const Requirement& r, const std::string& part) {
  throw Error(ErrorKind::NoMatch, "requirement '" + r.id + "' does not contain " + part, r.span,
              {r.id, part});
}

struct SubexprPattern {
  std::string key;                 // canonical text of the normalized pattern
  ExprKind kind;                   // kind of the normalized pattern
  std::vector<std::string> parts;  // operand keys when kind is And/Or
};

/// Replaces every occurrence of the pattern in `e` by `@name`. An And/Or
/// pattern also matches a strict subset of the operands of an And/Or node
/// of the same kind.
BoolExpr replace_subexpr(const BoolExpr& e, const SubexprPattern& p, const std::string& name,
                         int& count) {
  if (key_of(e) == p.key) {
    ++count;
    return BoolExpr::ref(name, e.span());
  }
  if ((e.kind() == ExprKind::And || e.kind() == ExprKind::Or) && e.kind() == p.kind) {
    std::vector<std::string> keys;
    for (const auto& c : e.children()) keys.push_back(key_of(c));
    const bool covered = std::all_of(p.parts.begin(), p.parts.end(), [&](const std::string& k) {
      return std::find(keys.begin(), keys.end(), k) != keys.end();
    });
    if (covered) {
      std::vector<BoolExpr> kids;
      bool placed = false;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        const bool in_pattern =
            std::find(p.parts.begin(), p.parts.end(), keys[i]) != p.parts.end();
        if (!in_pattern) {
          kids.push_back(e.children()[i]);
        } else if (!placed) {
          kids.push_back(BoolExpr::ref(name, e.children()[i].span()));
          placed = true;
        }
      }
      ++count;
      return with_children(e, std::move(kids));
    }
  }
  if (e.children().empty()) return e;
  std::vector<BoolExpr> kids;
  const int before = count;
  for (const auto& c : e.children()) kids.push_back(replace_subexpr(c, p, name, count));
  return count == before ? e : with_children(e, std::move(kids));
}

void flatten_conjuncts(const BoolExpr& e, std::vector<BoolExpr>& out) {
  if (e.kind() == ExprKind::And) {
    for (const auto& c : e.children()) flatten_conjuncts(c, out);
  } else {
    out.push_back(e);
  }
}

std::string clause_text(const ConditionClause& c) {
  return std::string(to_string(c.keyword)) + " (" + to_text(c.expr) + ")";
}

bool is_subexpression_body(const Fragment& body) {
  return body.conditions.size() == 1 && body.uses.empty() && body.contributes_only_conditions();
}

Requirement rewrite_subexpression(const Requirement& r, const Fragment& body) {
  const ConditionClause& pattern = body.conditions.front();
  const BoolExpr norm = normalize(pattern.expr);
  SubexprPattern p{to_text(norm), norm.kind(), {}};
  if (norm.kind() == ExprKind::And || norm.kind() == ExprKind::Or) {
    for (const auto& c : norm.children()) p.parts.push_back(to_text(c));
  }

  Requirement out = r;
  for (std::size_t i = 0; i < out.conditions.size(); ++i) {
    const auto& c = out.conditions[i];
    if (c.keyword == pattern.keyword && key_of(c.expr) == p.key) {
      out.conditions.erase(out.conditions.begin() + static_cast<std::ptrdiff_t>(i));
      out.uses.push_back({body.name, std::nullopt});
      return out;
    }
  }
  int count = 0;
  for (auto& c : out.conditions) c.expr = replace_subexpr(c.expr, p, body.name, count);
  if (count == 0) no_match(r, "condition subexpression '" + to_text(pattern.expr) + "'");
  return out;
}

Requirement rewrite_parts(const Requirement& r, const Fragment& body) {
  Requirement out = r;
  for (const auto& bc : body.conditions) {
    const std::string key = key_of(bc.expr);
    auto it = std::find_if(out.conditions.begin(), out.conditions.end(), [&](const auto& c) {
      return c.keyword == bc.keyword && key_of(c.expr) == key;
    });
    if (it == out.conditions.end()) no_match(r, "condition '" + clause_text(bc) + "'");
    out.conditions.erase(it);
  }
  for (const auto& bu : body.uses) {
    auto it = std::find(out.uses.begin(), out.uses.end(), bu);
    if (it == out.uses.end()) no_match(r, "reference '@" + bu.name + "'");
    out.uses.erase(it);
  }
  if (!body.timing.is_default()) {
    if (!(normalize(out.timing) == normalize(body.timing))) {
      no_match(r, "timing '" + body.timing.to_text() + "'");
    }
    out.timing = Timing::default_timing();
  }
  if (!body.scope.is_global()) {
    if (!(out.scope == body.scope)) no_match(r, "scope '" + body.scope.to_text() + "'");
    out.scope = Scope::global();
  }
  if (body.response) {
    std::vector<BoolExpr> wanted;
    flatten_conjuncts(normalize(*body.response), wanted);
    std::set<std::string> wanted_keys;
    for (const auto& w : wanted) wanted_keys.insert(to_text(w));

    std::vector<BoolExpr> conjuncts;
    flatten_conjuncts(out.response, conjuncts);
    std::vector<BoolExpr> kept;
    std::set<std::string> found;
    for (const auto& c : conjuncts) {
      const std::string k = key_of(c);
      if (wanted_keys.count(k)) {
        found.insert(k);
      } else {
        kept.push_back(c);
      }
    }
    if (found != wanted_keys || kept.empty()) {
      no_match(r, "response conjuncts '" + to_text(*body.response) + "'");
    }
    out.response = BoolExpr::conjunction(std::move(kept), out.response.span());
  }
  out.uses.push_back({body.name, std::nullopt});
  return out;
}

}  // namespace

RequirementSet extract_fragment(const RequirementSet& set, const ExtractionSpec& spec) {
  const std::string& name = spec.fragment_name;
  if (!is_identifier(name)) {
    throw Error(ErrorKind::InvalidArgument, "'" + name + "' is not a valid fragment name");
  }
  if (set.find_fragment(name)) {
    throw Error(ErrorKind::NameCollision, "fragment '" + name + "' already exists", std::nullopt,
                {name});
  }
  const auto atoms = atoms_of(set);
  if (atoms.count(name)) {
    throw Error(ErrorKind::NameCollision, "'" + name + "' is already used as an atom",
                std::nullopt, {name});
  }
  if (spec.body.empty()) {
    throw Error(ErrorKind::InvalidArgument, "extraction body is empty");
  }
  if (spec.targets.empty()) {
    throw Error(ErrorKind::InvalidArgument, "extraction needs at least one target");
  }

  Fragment body = spec.body;
  body.name = name;
  body.span.reset();

  std::set<std::string> targets;
  for (const auto& id : spec.targets) {
    set.requirement(id);
    targets.insert(id);
  }

  RequirementSet out;
  for (const auto& f : set.fragments()) out.add(f);
  out.add(body);
  const bool subexpression = is_subexpression_body(body);
  for (const auto& r : set.requirements()) {
    if (!targets.count(r.id)) {
      out.add(r);
    } else {
      out.add(subexpression ? rewrite_subexpression(r, body) : rewrite_parts(r, body));
    }
  }
  out.trailing_notes = set.trailing_notes;
  validate(out);
  return out;
}

}  // namespace fretfrag
