#pragma once

// Random generators for property tests. Everything is driven by an explicit
// seed so failures reproduce.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fretfrag/model.hpp"
#include "fretfrag/refactor.hpp"
#include "fretfrag/semantics.hpp"

namespace fretfrag::testgen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(range(0, static_cast<int>(xs.size()) - 1))];
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// a0..a{n-1}; every third one is a comparison atom when `comparisons`.
inline std::vector<Atom> atom_pool(int n, bool comparisons = true) {
  std::vector<Atom> out;
  for (int i = 0; i < n; ++i) {
    if (comparisons && i % 3 == 2) {
      out.push_back(Atom::comparison(
          Term::apply("f", {Term::identifier("x" + std::to_string(i))}), RelOp::Gt,
          Term::add(Term::identifier("lim"), Term::number(std::to_string(i)))));
    } else {
      out.push_back(Atom::identifier("a" + std::to_string(i)));
    }
  }
  return out;
}

struct ExprOptions {
  int max_depth = 3;
  std::vector<std::string> refs;  // fragment names allowed as leaves
  bool implies = true;
};

inline BoolExpr expr(Gen& g, const std::vector<Atom>& atoms, const ExprOptions& o, int depth = 0) {
  if (depth >= o.max_depth || g.chance(0.35)) {
    if (!o.refs.empty() && g.chance(0.15)) return BoolExpr::ref(g.pick(o.refs));
    return BoolExpr::atom(g.pick(atoms));
  }
  const int k = g.range(0, o.implies ? 3 : 2);
  switch (k) {
    case 0: return BoolExpr::negate(expr(g, atoms, o, depth + 1));
    case 1:
    case 2: {
      std::vector<BoolExpr> kids;
      const int n = g.range(2, 3);
      for (int i = 0; i < n; ++i) kids.push_back(expr(g, atoms, o, depth + 1));
      return k == 1 ? BoolExpr::conjunction(std::move(kids))
                    : BoolExpr::disjunction(std::move(kids));
    }
    default: return BoolExpr::implies(expr(g, atoms, o, depth + 1), expr(g, atoms, o, depth + 1));
  }
}

inline Timing timing(Gen& g, const std::vector<Atom>& atoms, int max_ticks = 3) {
  switch (g.range(0, 7)) {
    case 0: return Timing::default_timing();
    case 1: return Timing::of(Timing::Kind::Immediately);
    case 2: return Timing::of(Timing::Kind::Always);
    case 3: return Timing::of(Timing::Kind::Never);
    case 4: return Timing::of(Timing::Kind::Eventually);
    case 5: return Timing::until(expr(g, atoms, {1, {}, false}));
    case 6: return Timing::within(g.range(1, max_ticks));
    default: return Timing::for_ticks(g.range(1, max_ticks));
  }
}

inline Scope scope(Gen& g, const std::vector<Atom>& modes) {
  switch (g.range(0, 5)) {
    case 0: return Scope::in(g.pick(modes));
    case 1: return Scope::before(g.pick(modes));
    case 2: return Scope::after(g.pick(modes));
    default: return Scope::global();
  }
}

struct RequirementOptions {
  int max_clauses = 2;
  int max_depth = 3;
  bool scopes = true;
  std::vector<std::string> refs;
};

/// Requirement over `atoms` (identifier atoms only serve as scope modes).
inline Requirement requirement(Gen& g, const std::string& id, const std::vector<Atom>& atoms,
                               const RequirementOptions& o = {}) {
  Requirement r;
  r.id = id;
  r.component = "Controller";
  std::vector<Atom> modes;
  for (const auto& a : atoms) {
    if (a.is_identifier()) modes.push_back(a);
  }
  if (o.scopes && !modes.empty()) r.scope = scope(g, modes);
  const int clauses = g.range(0, o.max_clauses);
  for (int i = 0; i < clauses; ++i) {
    r.conditions.push_back({g.chance(0.5) ? ConditionClause::Keyword::If
                                          : ConditionClause::Keyword::When,
                            expr(g, atoms, {o.max_depth, o.refs, true})});
  }
  r.timing = timing(g, atoms);
  r.response = expr(g, atoms, {o.max_depth, {}, true});
  return r;
}

/// Random slice of `pool` of size lo..hi, in pool order.
inline std::vector<Atom> atom_subset(Gen& g, const std::vector<Atom>& pool, int lo, int hi) {
  std::vector<Atom> xs = pool;
  std::shuffle(xs.begin(), xs.end(), g.engine());
  const int keep = std::min<int>(g.range(lo, hi), static_cast<int>(xs.size()));
  xs.erase(xs.begin() + keep, xs.end());
  return xs;
}

struct SetOptions {
  int max_requirements = 10;
  int atoms_per_requirement = 6;  // upper bound on distinct atoms mentioned
  int pool_size = 8;
  bool fragments = true;
  bool scopes = true;
};

inline std::size_t atom_count(const Requirement& r) { return atoms_of(r).size(); }

/// Valid set: condition-only fragments G0..G2 (each may reference earlier
/// ones), one timing fragment T0, and requirements R0.. that reference them
/// without creating merge conflicts. Requirements exceeding the atom bound
/// (after inlining) are regenerated.
inline RequirementSet random_set(Gen& g, const SetOptions& o = {}) {
  const auto pool = atom_pool(o.pool_size);
  RequirementSet set;
  std::vector<std::string> cond_frags;
  if (o.fragments) {
    const int n = g.range(0, 3);
    for (int i = 0; i < n; ++i) {
      Fragment f;
      f.name = "G" + std::to_string(i);
      const auto local = atom_subset(g, pool, 1, 2);
      f.conditions.push_back({ConditionClause::Keyword::If, expr(g, local, {2, cond_frags, true})});
      if (g.chance(0.3)) f.uses.push_back({cond_frags.empty() ? f.name : g.pick(cond_frags), {}});
      if (!f.uses.empty() && f.uses.back().name == f.name) f.uses.clear();
      set.add(f);
      cond_frags.push_back(f.name);
    }
    if (g.chance(0.5)) {
      Fragment t;
      t.name = "T0";
      const auto local = atom_subset(g, pool, 1, 2);
      t.conditions.push_back({ConditionClause::Keyword::When, BoolExpr::atom(local[0])});
      t.timing = Timing::until(BoolExpr::atom(local.back()));
      set.add(t);
    }
  }
  const bool has_t0 = set.find_fragment("T0") != nullptr;
  const int reqs = g.range(1, o.max_requirements);
  for (int i = 0; i < reqs; ++i) {
    for (int attempt = 0;; ++attempt) {
      const auto local = atom_subset(g, pool, 1, o.atoms_per_requirement);
      RequirementOptions ro;
      ro.scopes = o.scopes;
      ro.refs = cond_frags;
      Requirement r = requirement(g, "R" + std::to_string(i), local, ro);
      if (!cond_frags.empty() && g.chance(0.3)) r.uses.push_back({g.pick(cond_frags), {}});
      if (has_t0 && g.chance(0.3)) {
        r.uses.push_back({"T0", {}});
        r.timing = Timing::default_timing();
      }
      const Requirement inlined = combine_templates(r, set);
      if (static_cast<int>(atom_count(inlined)) <= o.atoms_per_requirement || attempt > 50) {
        set.add(std::move(r));
        break;
      }
    }
  }
  validate(set);
  return set;
}

/// Trace of `length` ticks with fair random bits.
inline Trace trace(Gen& g, const std::vector<Atom>& atoms, int length) {
  std::vector<std::vector<bool>> steps(static_cast<std::size_t>(length));
  for (auto& s : steps) {
    for (std::size_t j = 0; j < atoms.size(); ++j) s.push_back(g.chance(0.5));
  }
  return Trace(atoms, std::move(steps));
}

inline std::vector<Atom> atoms_vector(const Requirement& r) {
  std::vector<Atom> out;
  for (const auto& [text, a] : atoms_of(r)) out.push_back(a);
  return out;
}

// ---------------------------------------------------------------------------
// Applicable extractions
// ---------------------------------------------------------------------------

inline void raw_subtrees(const BoolExpr& e, std::vector<BoolExpr>& out) {
  out.push_back(e);
  for (const auto& c : e.children()) raw_subtrees(c, out);
}

inline std::string key(const BoolExpr& e) { return to_text(normalize(e)); }

inline void flat_conjuncts(const BoolExpr& e, std::vector<BoolExpr>& out) {
  if (e.kind() == ExprKind::And) {
    for (const auto& c : e.children()) flat_conjuncts(c, out);
  } else {
    out.push_back(e);
  }
}

/// An ExtractionSpec that applies to every target: a condition
/// subexpression, a whole clause (optionally with the timing), or response
/// conjuncts, taken from a random requirement. Returns false if the chosen
/// requirement offers nothing to extract.
inline bool random_extraction(Gen& g, const RequirementSet& set, const std::string& name,
                              ExtractionSpec& spec) {
  const auto& reqs = set.requirements();
  const Requirement& src = g.pick(reqs);
  spec = {};
  spec.fragment_name = name;
  spec.body.name = name;

  const int mode = g.range(0, 2);
  if (mode == 0 && !src.conditions.empty()) {
    std::vector<BoolExpr> subs;
    raw_subtrees(g.pick(src.conditions).expr, subs);
    const BoolExpr pat = g.pick(subs);
    spec.body.conditions.push_back({ConditionClause::Keyword::If, pat});
    const std::string k = key(pat);
    for (const auto& r : reqs) {
      bool found = false;
      for (const auto& c : r.conditions) {
        std::vector<BoolExpr> rs;
        raw_subtrees(c.expr, rs);
        for (const auto& s : rs) found = found || key(s) == k;
      }
      if (found && (r.id == src.id || g.chance(0.8))) spec.targets.push_back(r.id);
    }
    return true;
  }
  if (mode == 1 && (!src.conditions.empty() || !src.timing.is_default())) {
    if (!src.conditions.empty()) spec.body.conditions.push_back(g.pick(src.conditions));
    if (!src.timing.is_default() && (spec.body.conditions.empty() || g.chance(0.5))) {
      spec.body.timing = src.timing;
    }
    for (const auto& r : reqs) {
      bool ok = true;
      for (const auto& bc : spec.body.conditions) {
        ok = ok && std::any_of(r.conditions.begin(), r.conditions.end(), [&](const auto& c) {
               return c.keyword == bc.keyword && key(c.expr) == key(bc.expr);
             });
      }
      if (!spec.body.timing.is_default()) {
        ok = ok && normalize(r.timing) == normalize(spec.body.timing);
      }
      if (ok && (r.id == src.id || g.chance(0.8))) spec.targets.push_back(r.id);
    }
    return true;
  }
  if (mode == 2 && src.response.kind() == ExprKind::And) {
    std::vector<BoolExpr> src_conj;
    flat_conjuncts(src.response, src_conj);
    const BoolExpr conj = g.pick(src_conj);
    spec.body.response = conj;
    const std::string k = key(conj);
    for (const auto& r : reqs) {
      std::vector<BoolExpr> cs;
      flat_conjuncts(r.response, cs);
      const bool present = std::any_of(cs.begin(), cs.end(), [&](const auto& c) { return key(c) == k; });
      const bool rest = std::any_of(cs.begin(), cs.end(), [&](const auto& c) { return key(c) != k; });
      if (present && rest && (r.id == src.id || g.chance(0.8))) spec.targets.push_back(r.id);
    }
    return !spec.targets.empty();
  }
  return false;
}

}  // namespace fretfrag::testgen
