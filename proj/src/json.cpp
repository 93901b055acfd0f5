#include "fretfrag/json.hpp"

namespace fretfrag {

using nlohmann::json;

namespace {

const char* kind_name(ExprKind k) {
  switch (k) {
    case ExprKind::Atom: return "atom";
    case ExprKind::FragmentRef: return "ref";
    case ExprKind::Not: return "not";
    case ExprKind::And: return "and";
    case ExprKind::Or: return "or";
    case ExprKind::Implies: return "implies";
  }
  return "?";
}

const char* scope_name(Scope::Kind k) {
  switch (k) {
    case Scope::Kind::Global: return "global";
    case Scope::Kind::In: return "in";
    case Scope::Kind::Before: return "before";
    case Scope::Kind::After: return "after";
  }
  return "?";
}

const char* timing_name(Timing::Kind k) {
  switch (k) {
    case Timing::Kind::Default: return "default";
    case Timing::Kind::Immediately: return "immediately";
    case Timing::Kind::Always: return "always";
    case Timing::Kind::Never: return "never";
    case Timing::Kind::Eventually: return "eventually";
    case Timing::Kind::Until: return "until";
    case Timing::Kind::Within: return "within";
    case Timing::Kind::For: return "for";
  }
  return "?";
}

json optional_span(const std::optional<SourceSpan>& s) { return s ? to_json(*s) : json(nullptr); }

json clauses(const std::vector<ConditionClause>& cs) {
  json out = json::array();
  for (const auto& c : cs) out.push_back({{"keyword", to_string(c.keyword)}, {"expr", to_json(c.expr)}});
  return out;
}

json uses(const std::vector<FragmentUse>& us) {
  json out = json::array();
  for (const auto& u : us) out.push_back(u.name);
  return out;
}

}  // namespace

json to_json(const SourceSpan& span) {
  return {{"file", span.file},
          {"startLine", span.startLine},
          {"startCol", span.startCol},
          {"endLine", span.endLine},
          {"endCol", span.endCol}};
}

json to_json(const BoolExpr& e) {
  json out{{"kind", kind_name(e.kind())}};
  switch (e.kind()) {
    case ExprKind::Atom:
      out["text"] = e.atom().text();
      out["comparison"] = !e.atom().is_identifier();
      break;
    case ExprKind::FragmentRef: out["name"] = e.ref_name(); break;
    default: {
      json kids = json::array();
      for (const auto& c : e.children()) kids.push_back(to_json(c));
      out["operands"] = std::move(kids);
    }
  }
  return out;
}

json to_json(const Timing& t) {
  json out{{"kind", timing_name(t.kind)}};
  if (t.stop) out["stop"] = to_json(*t.stop);
  if (t.kind == Timing::Kind::Within || t.kind == Timing::Kind::For) out["ticks"] = t.ticks;
  return out;
}

json to_json(const Scope& s) {
  json out{{"kind", scope_name(s.kind)}};
  if (s.mode) out["mode"] = s.mode->text();
  return out;
}

json to_json(const Requirement& r) {
  return {{"id", r.id},
          {"parent", r.parent ? json(*r.parent) : json(nullptr)},
          {"scope", to_json(r.scope)},
          {"conditions", clauses(r.conditions)},
          {"uses", uses(r.uses)},
          {"component", r.component},
          {"timing", to_json(r.timing)},
          {"response", to_json(r.response)},
          {"notes", r.notes},
          {"span", optional_span(r.span)}};
}

json to_json(const Fragment& f) {
  return {{"name", f.name},
          {"scope", to_json(f.scope)},
          {"conditions", clauses(f.conditions)},
          {"uses", uses(f.uses)},
          {"timing", to_json(f.timing)},
          {"response", f.response ? to_json(*f.response) : json(nullptr)},
          {"notes", f.notes},
          {"span", optional_span(f.span)}};
}

json to_json(const RequirementSet& set) {
  json fragments = json::array();
  for (const auto& f : set.fragments()) fragments.push_back(to_json(f));
  json requirements = json::array();
  for (const auto& r : set.requirements()) requirements.push_back(to_json(r));
  return {{"fragments", std::move(fragments)},
          {"requirements", std::move(requirements)},
          {"trailingNotes", set.trailing_notes}};
}

json to_json(const Error& e) {
  return {{"kind", to_string(e.kind())},
          {"message", e.what()},
          {"span", optional_span(e.span())},
          {"details", e.details()}};
}

json to_json(const Trace& t) {
  json atoms = json::array();
  for (const auto& a : t.atoms()) atoms.push_back(a.text());
  json steps = json::array();
  for (const auto& s : t.steps()) {
    json row = json::array();
    for (bool b : s) row.push_back(b ? 1 : 0);
    steps.push_back(std::move(row));
  }
  return {{"atoms", std::move(atoms)}, {"steps", std::move(steps)}};
}

json to_json(const Verdict& v) {
  json atoms = json::array();
  for (const auto& a : v.atoms) atoms.push_back(a.text());
  json out{{"verdict", to_string(v.kind)},
           {"mode", to_string(v.mode)},
           {"tracesChecked", v.traces_checked},
           {"atoms", std::move(atoms)}};
  if (v.witness) {
    out["witness"] = to_json(*v.witness);
    out["left"] = v.left_value;
    out["right"] = v.right_value;
  }
  return out;
}

json to_json(const RefactorReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    json j = to_json(e.verdict);
    j["id"] = e.id;
    j["passed"] = e.verdict.passed();
    entries.push_back(std::move(j));
  }
  return {{"entries", std::move(entries)},
          {"failures", report.failures()},
          {"passed", report.all_passed()}};
}

json to_json(const DupPart& p) {
  json out{{"kind", to_string(p.kind)}, {"text", p.text()}, {"size", p.size()}};
  if (p.kind == DupPart::Kind::Timing) {
    out["timing"] = to_json(p.timing);
  } else {
    out["expr"] = to_json(p.expr);
  }
  return out;
}

json to_json(const DupCandidate& c) {
  json parts = json::array();
  for (const auto& p : c.parts) parts.push_back(to_json(p));
  json subsumed = json::array();
  for (const auto& p : c.subsumed) subsumed.push_back(to_json(p));
  return {{"parts", std::move(parts)},
          {"subsumed", std::move(subsumed)},
          {"support", c.support},
          {"supportCount", c.support.size()},
          {"size", c.size}};
}

json to_json(const std::vector<DupCandidate>& candidates) {
  json out = json::array();
  for (const auto& c : candidates) out.push_back(to_json(c));
  return out;
}

json to_json(const DependencyGraph& g) {
  json edges = json::array();
  for (const auto& [from, to] : g.edges) edges.push_back({{"from", from}, {"to", to}});
  return {{"requirements", g.requirements}, {"fragments", g.fragments}, {"edges", std::move(edges)}};
}

}  // namespace fretfrag
