#include "fretfrag/analysis.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "fretfrag/refactor.hpp"

namespace fretfrag {

const char* to_string(DupPart::Kind kind) {
  switch (kind) {
    case DupPart::Kind::Subexpression: return "subexpression";
    case DupPart::Kind::Clause: return "clause";
    case DupPart::Kind::Timing: return "timing";
    case DupPart::Kind::Response: return "response";
  }
  return "?";
}

std::string DupPart::text() const {
  switch (kind) {
    case Kind::Subexpression: return to_text(expr);
    case Kind::Clause: return std::string(to_string(keyword)) + " (" + to_text(expr) + ")";
    case Kind::Timing: return timing.to_text();
    case Kind::Response: return "satisfy (" + to_text(expr) + ")";
  }
  return {};
}

std::size_t DupPart::size() const {
  if (kind == Kind::Timing) return 1 + (timing.stop ? node_count(*timing.stop) : 0);
  return node_count(expr);
}

std::string DupCandidate::text() const {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p.text();
  return out;
}

namespace {

void conjuncts_of(const BoolExpr& e, std::vector<BoolExpr>& out) {
  if (e.kind() == ExprKind::And) {
    for (const auto& c : e.children()) conjuncts_of(c, out);
  } else {
    out.push_back(e);
  }
}

void subtrees(const BoolExpr& e, std::vector<BoolExpr>& out) {
  if (e.kind() == ExprKind::FragmentRef) return;
  out.push_back(e);
  for (const auto& c : e.children()) subtrees(c, out);
}

std::string key_of(const DupPart& p) {
  return std::string(to_string(p.kind)) + ":" + p.text();
}

bool nested_in(const DupPart& inner, const DupPart& outer) {
  if (inner.kind != DupPart::Kind::Subexpression) return false;
  if (outer.kind != DupPart::Kind::Subexpression && outer.kind != DupPart::Kind::Clause) {
    return false;
  }
  if (outer.kind == DupPart::Kind::Subexpression && outer.expr == inner.expr) return false;
  return contains_subtree(outer.expr, inner.expr);
}

bool lone_identifier(const std::vector<DupPart>& parts) {
  if (parts.size() != 1 || parts[0].kind == DupPart::Kind::Timing) return false;
  const BoolExpr& e = parts[0].expr;
  return e.kind() == ExprKind::Atom && e.atom().is_identifier();
}

}  // namespace

bool requirement_contains(const Requirement& r, const DupPart& part) {
  switch (part.kind) {
    case DupPart::Kind::Subexpression:
      return std::any_of(r.conditions.begin(), r.conditions.end(), [&](const auto& c) {
        return contains_subtree(normalize(c.expr), part.expr);
      });
    case DupPart::Kind::Clause:
      return std::any_of(r.conditions.begin(), r.conditions.end(), [&](const auto& c) {
        return c.keyword == part.keyword && normalize(c.expr) == part.expr;
      });
    case DupPart::Kind::Timing:
      return !r.timing.is_default() && normalize(r.timing) == part.timing;
    case DupPart::Kind::Response: {
      std::vector<BoolExpr> cs;
      conjuncts_of(normalize(r.response), cs);
      // extracting the only conjunct would leave an empty response
      return cs.size() > 1 && std::find(cs.begin(), cs.end(), part.expr) != cs.end();
    }
  }
  return false;
}

std::vector<DupCandidate> find_duplicates(const RequirementSet& set, const DupOptions& opts) {
  struct Item {
    DupPart part;
    std::vector<std::size_t> support;  // requirement indices, ascending
  };
  std::map<std::string, Item> items;

  const auto& reqs = set.requirements();
  for (std::size_t ri = 0; ri < reqs.size(); ++ri) {
    const Requirement& r = reqs[ri];
    std::vector<DupPart> found;
    for (const auto& c : r.conditions) {
      const BoolExpr n = normalize(c.expr);
      DupPart clause;
      clause.kind = DupPart::Kind::Clause;
      clause.keyword = c.keyword;
      clause.expr = n;
      found.push_back(clause);
      std::vector<BoolExpr> subs;
      subtrees(n, subs);
      for (auto& s : subs) {
        DupPart p;
        p.expr = std::move(s);
        found.push_back(std::move(p));
      }
    }
    if (!r.timing.is_default()) {
      DupPart p;
      p.kind = DupPart::Kind::Timing;
      p.timing = normalize(r.timing);
      found.push_back(std::move(p));
    }
    if (opts.include_responses) {
      std::vector<BoolExpr> cs;
      conjuncts_of(normalize(r.response), cs);
      // extracting the whole response would leave the requirement without one
      if (cs.size() > 1) {
        for (auto& c : cs) {
          DupPart p;
          p.kind = DupPart::Kind::Response;
          p.expr = std::move(c);
          found.push_back(std::move(p));
        }
      }
    }
    for (auto& p : found) {
      auto [it, fresh] = items.try_emplace(key_of(p), Item{p, {}});
      if (it->second.support.empty() || it->second.support.back() != ri) {
        it->second.support.push_back(ri);
      }
    }
  }

  std::map<std::vector<std::size_t>, std::vector<const DupPart*>> groups;
  for (const auto& [key, item] : items) {
    if (static_cast<int>(item.support.size()) >= opts.min_support) {
      groups[item.support].push_back(&item.part);
    }
  }

  std::vector<DupCandidate> out;
  for (const auto& [support, parts] : groups) {
    DupCandidate cand;
    for (const DupPart* p : parts) {
      const bool nested = std::any_of(parts.begin(), parts.end(), [&](const DupPart* q) {
        return q != p && nested_in(*p, *q);
      });
      (nested ? cand.subsumed : cand.parts).push_back(*p);
    }
    if (lone_identifier(cand.parts) && static_cast<int>(support.size()) < opts.lone_atom_support) {
      continue;
    }
    auto by_size = [](const DupPart& a, const DupPart& b) {
      if (a.kind != b.kind) return a.kind < b.kind;
      if (a.size() != b.size()) return a.size() > b.size();
      return a.text() < b.text();
    };
    std::sort(cand.parts.begin(), cand.parts.end(), by_size);
    std::sort(cand.subsumed.begin(), cand.subsumed.end(), by_size);
    for (const auto& p : cand.parts) cand.size += p.size();
    for (std::size_t i : support) cand.support.push_back(reqs[i].id);
    out.push_back(std::move(cand));
  }

  std::sort(out.begin(), out.end(), [](const DupCandidate& a, const DupCandidate& b) {
    if (a.support.size() != b.support.size()) return a.support.size() > b.support.size();
    if (a.size != b.size) return a.size > b.size;
    return a.text() < b.text();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Dependency graph
// ---------------------------------------------------------------------------

namespace {

template <typename Decl>
std::vector<std::string> references_of(const Decl& d) {
  std::vector<std::string> refs;
  for (const auto& u : d.uses) refs.push_back(u.name);
  for (const auto& c : d.conditions) collect_refs(c.expr, refs);
  if (d.timing.stop) collect_refs(*d.timing.stop, refs);
  if constexpr (std::is_same_v<Decl, Requirement>) {
    if (!d.response.empty()) collect_refs(d.response, refs);
  } else {
    if (d.response) collect_refs(*d.response, refs);
  }
  std::vector<std::string> unique;
  for (auto& r : refs) {
    if (std::find(unique.begin(), unique.end(), r) == unique.end()) unique.push_back(r);
  }
  return unique;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

DependencyGraph dependency_graph(const RequirementSet& set) {
  DependencyGraph g;
  for (const auto& r : set.requirements()) {
    g.requirements.push_back(r.id);
    for (auto& f : references_of(r)) g.edges.emplace_back(r.id, std::move(f));
  }
  for (const auto& f : set.fragments()) {
    g.fragments.push_back(f.name);
    for (auto& h : references_of(f)) g.edges.emplace_back(f.name, std::move(h));
  }
  return g;
}

std::string DependencyGraph::to_dot() const {
  std::string out = "digraph dependencies {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& r : requirements) out += "  " + quoted(r) + ";\n";
  for (const auto& f : fragments) out += "  " + quoted(f) + " [style=filled, fillcolor=grey];\n";
  for (const auto& [from, to] : edges) out += "  " + quoted(from) + " -> " + quoted(to) + ";\n";
  out += "}\n";
  return out;
}

std::vector<std::string> impact(const RequirementSet& set, const std::string& fragment) {
  if (!set.find_fragment(fragment)) {
    throw Error(ErrorKind::UnknownFragment, "unknown fragment '" + fragment + "'", std::nullopt,
                {fragment});
  }
  const DependencyGraph g = dependency_graph(set);
  std::map<std::string, std::vector<std::string>> users;
  for (const auto& [from, to] : g.edges) users[to].push_back(from);

  std::set<std::string> reached{fragment};
  std::deque<std::string> queue{fragment};
  while (!queue.empty()) {
    const std::string node = queue.front();
    queue.pop_front();
    for (const auto& u : users[node]) {
      if (reached.insert(u).second) queue.push_back(u);
    }
  }
  std::vector<std::string> out;
  for (const auto& id : g.requirements) {
    if (reached.count(id)) out.push_back(id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Applying candidates
// ---------------------------------------------------------------------------

ApplyResult apply_duplicates(const RequirementSet& set, const std::vector<DupCandidate>& candidates,
                             const std::string& prefix) {
  ApplyResult result{set, {}, {}};

  std::vector<const DupCandidate*> order;
  for (const auto& c : candidates) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const DupCandidate* a, const DupCandidate* b) {
    if (a->size != b->size) return a->size > b->size;
    return a->support.size() > b->support.size();
  });

  int counter = 0;
  for (const DupCandidate* cand : order) {
    const std::string label = "[" + cand->text() + "]";
    const auto subexprs = std::count_if(cand->parts.begin(), cand->parts.end(), [](const auto& p) {
      return p.kind == DupPart::Kind::Subexpression;
    });
    if (cand->parts.empty()) continue;
    if (subexprs > 0 && cand->parts.size() > 1) {
      result.log.push_back("skipped " + label + ": subexpression grouped with other parts");
      continue;
    }

    Fragment body;
    std::vector<BoolExpr> responses;
    for (const auto& p : cand->parts) {
      switch (p.kind) {
        case DupPart::Kind::Subexpression:
          body.conditions.push_back({ConditionClause::Keyword::If, p.expr});
          break;
        case DupPart::Kind::Clause: body.conditions.push_back({p.keyword, p.expr}); break;
        case DupPart::Kind::Timing: body.timing = p.timing; break;
        case DupPart::Kind::Response: responses.push_back(p.expr); break;
      }
    }
    if (!responses.empty()) body.response = BoolExpr::conjunction(std::move(responses));

    const auto atoms = atoms_of(result.set);
    std::string name;
    do {
      name = prefix + std::to_string(++counter);
    } while (result.set.find_fragment(name) || atoms.count(name));

    try {
      result.set = extract_fragment(result.set, {name, body, cand->support});
      result.created.push_back(name);
      result.log.push_back("extracted " + name + " " + label + " from " +
                           std::to_string(cand->support.size()) + " requirements");
    } catch (const Error& e) {
      --counter;
      result.log.push_back("skipped " + label + ": " + e.what());
    }
  }
  return result;
}

}  // namespace fretfrag
