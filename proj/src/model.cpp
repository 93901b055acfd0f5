#include "fretfrag/model.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

namespace fretfrag {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Terms and atoms
// ---------------------------------------------------------------------------

const char* to_string(RelOp op) {
  switch (op) {
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
    case RelOp::Eq: return "=";
    case RelOp::Ne: return "!=";
  }
  return "?";
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(),
                     [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

Term Term::identifier(std::string name) { return {Kind::Identifier, std::move(name), {}}; }
Term Term::number(std::string literal) { return {Kind::Number, std::move(literal), {}}; }
Term Term::apply(std::string function, std::vector<Term> args) {
  return {Kind::Apply, std::move(function), std::move(args)};
}
Term Term::add(Term lhs, Term rhs) { return {Kind::Add, "+", {std::move(lhs), std::move(rhs)}}; }
Term Term::sub(Term lhs, Term rhs) { return {Kind::Sub, "-", {std::move(lhs), std::move(rhs)}}; }

std::string Term::to_text() const {
  switch (kind) {
    case Kind::Identifier:
    case Kind::Number:
      return name;
    case Kind::Apply: {
      std::string out = name + "(";
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ',';
        out += args[i].to_text();
      }
      return out + ")";
    }
    case Kind::Add:
    case Kind::Sub:
      return args[0].to_text() + (kind == Kind::Add ? " + " : " - ") + args[1].to_text();
  }
  return {};
}

Atom Atom::identifier(std::string name) {
  if (!fretfrag::is_identifier(name)) {
    throw Error(ErrorKind::InvalidArgument, "'" + name + "' is not an identifier");
  }
  Atom a;
  a.kind_ = Kind::Identifier;
  a.text_ = std::move(name);
  return a;
}

Atom Atom::comparison(Term lhs, RelOp op, Term rhs) {
  Atom a;
  a.kind_ = Kind::Comparison;
  a.text_ = lhs.to_text() + ' ' + to_string(op) + ' ' + rhs.to_text();
  a.comparison_ = Comparison{std::move(lhs), op, std::move(rhs)};
  return a;
}

// ---------------------------------------------------------------------------
// BoolExpr
// ---------------------------------------------------------------------------

struct BoolExpr::Node {
  ExprKind kind;
  std::optional<Atom> atom;
  std::string name;
  std::vector<BoolExpr> children;
  std::optional<SourceSpan> span;
};

BoolExpr BoolExpr::atom(Atom a, std::optional<SourceSpan> span) {
  return BoolExpr(std::make_shared<const Node>(
      Node{ExprKind::Atom, std::move(a), {}, {}, std::move(span)}));
}

BoolExpr BoolExpr::ref(std::string fragment, std::optional<SourceSpan> span) {
  return BoolExpr(std::make_shared<const Node>(
      Node{ExprKind::FragmentRef, std::nullopt, std::move(fragment), {}, std::move(span)}));
}

BoolExpr BoolExpr::negate(BoolExpr e, std::optional<SourceSpan> span) {
  return BoolExpr(std::make_shared<const Node>(
      Node{ExprKind::Not, std::nullopt, {}, {std::move(e)}, std::move(span)}));
}

namespace {

template <class Make>
BoolExpr nary(ExprKind kind, std::vector<BoolExpr> operands, std::optional<SourceSpan> span,
              Make make) {
  if (operands.empty()) {
    throw Error(ErrorKind::InvalidArgument, "empty conjunction/disjunction");
  }
  if (operands.size() == 1) return std::move(operands.front());
  return make(kind, std::move(operands), std::move(span));
}

}  // namespace

BoolExpr BoolExpr::conjunction(std::vector<BoolExpr> operands, std::optional<SourceSpan> span) {
  return nary(ExprKind::And, std::move(operands), std::move(span),
              [](ExprKind k, std::vector<BoolExpr> ops, std::optional<SourceSpan> sp) {
                return BoolExpr(std::make_shared<const Node>(
                    Node{k, std::nullopt, {}, std::move(ops), std::move(sp)}));
              });
}

BoolExpr BoolExpr::disjunction(std::vector<BoolExpr> operands, std::optional<SourceSpan> span) {
  return nary(ExprKind::Or, std::move(operands), std::move(span),
              [](ExprKind k, std::vector<BoolExpr> ops, std::optional<SourceSpan> sp) {
                return BoolExpr(std::make_shared<const Node>(
                    Node{k, std::nullopt, {}, std::move(ops), std::move(sp)}));
              });
}

BoolExpr BoolExpr::implies(BoolExpr lhs, BoolExpr rhs, std::optional<SourceSpan> span) {
  return BoolExpr(std::make_shared<const Node>(Node{
      ExprKind::Implies, std::nullopt, {}, {std::move(lhs), std::move(rhs)}, std::move(span)}));
}

ExprKind BoolExpr::kind() const noexcept { return node_->kind; }
const Atom& BoolExpr::atom() const { return *node_->atom; }
const std::string& BoolExpr::ref_name() const { return node_->name; }
std::span<const BoolExpr> BoolExpr::children() const noexcept { return node_->children; }
const std::optional<SourceSpan>& BoolExpr::span() const noexcept { return node_->span; }

bool BoolExpr::operator==(const BoolExpr& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  if (node_->kind != other.node_->kind) return false;
  switch (node_->kind) {
    case ExprKind::Atom: return *node_->atom == *other.node_->atom;
    case ExprKind::FragmentRef: return node_->name == other.node_->name;
    default: return node_->children == other.node_->children;
  }
}

namespace {

int precedence(const BoolExpr& e) {
  switch (e.kind()) {
    case ExprKind::Implies: return 1;
    case ExprKind::Or: return 2;
    case ExprKind::And: return 3;
    case ExprKind::Not: return 4;
    default: return 5;
  }
}

void print_expr(const BoolExpr& e, bool operand, std::string& out);

void print_child(const BoolExpr& child, bool parens, std::string& out) {
  if (parens) {
    out += '(';
    print_expr(child, false, out);
    out += ')';
  } else {
    print_expr(child, true, out);
  }
}

// `operand` is set when e sits under a boolean operator; comparison atoms
// are then parenthesized for readability.
void print_expr(const BoolExpr& e, bool operand, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Atom:
      if (operand && !e.atom().is_identifier()) {
        out += '(' + e.atom().text() + ')';
      } else {
        out += e.atom().text();
      }
      return;
    case ExprKind::FragmentRef:
      out += '@' + e.ref_name();
      return;
    case ExprKind::Not:
      out += '!';
      print_child(e.children()[0], precedence(e.children()[0]) < 5, out);
      return;
    case ExprKind::And:
    case ExprKind::Or: {
      const int own = precedence(e);
      const char* sep = e.kind() == ExprKind::And ? " & " : " | ";
      bool first = true;
      for (const auto& c : e.children()) {
        if (!first) out += sep;
        first = false;
        print_child(c, precedence(c) <= own, out);
      }
      return;
    }
    case ExprKind::Implies:
      print_child(e.children()[0], precedence(e.children()[0]) <= 1, out);
      out += " => ";
      print_child(e.children()[1], false, out);
      return;
  }
}

}  // namespace

std::string to_text(const BoolExpr& e) {
  std::string out;
  print_expr(e, false, out);
  return out;
}

BoolExpr normalize(const BoolExpr& e) {
  switch (e.kind()) {
    case ExprKind::Atom:
    case ExprKind::FragmentRef:
      return e;
    case ExprKind::Not: {
      BoolExpr inner = normalize(e.children()[0]);
      if (inner.kind() == ExprKind::Not) return inner.children()[0];
      return BoolExpr::negate(std::move(inner));
    }
    case ExprKind::Implies:
      return normalize(
          BoolExpr::disjunction({BoolExpr::negate(e.children()[0]), e.children()[1]}));
    case ExprKind::And:
    case ExprKind::Or: {
      struct Keyed {
        std::uint64_t hash;
        std::string text;
        BoolExpr expr;
      };
      std::vector<Keyed> operands;
      auto push = [&](const BoolExpr& n) {
        std::string text = to_text(n);
        std::uint64_t h = fnv1a(text);
        operands.push_back({h, std::move(text), n});
      };
      for (const auto& child : e.children()) {
        BoolExpr n = normalize(child);
        if (n.kind() == e.kind()) {
          for (const auto& grandchild : n.children()) push(grandchild);
        } else {
          push(n);
        }
      }
      std::stable_sort(operands.begin(), operands.end(), [](const Keyed& a, const Keyed& b) {
        return std::tie(a.hash, a.text) < std::tie(b.hash, b.text);
      });
      operands.erase(std::unique(operands.begin(), operands.end(),
                                 [](const Keyed& a, const Keyed& b) { return a.text == b.text; }),
                     operands.end());
      std::vector<BoolExpr> out;
      out.reserve(operands.size());
      for (auto& k : operands) out.push_back(std::move(k.expr));
      return e.kind() == ExprKind::And ? BoolExpr::conjunction(std::move(out))
                                       : BoolExpr::disjunction(std::move(out));
    }
  }
  return e;
}

std::uint64_t canonical_hash(const BoolExpr& e) { return fnv1a(to_text(normalize(e))); }

std::size_t node_count(const BoolExpr& e) {
  std::size_t n = 1;
  for (const auto& c : e.children()) n += node_count(c);
  return n;
}

bool contains_subtree(const BoolExpr& haystack, const BoolExpr& needle) {
  if (haystack == needle) return true;
  for (const auto& c : haystack.children()) {
    if (contains_subtree(c, needle)) return true;
  }
  return false;
}

void collect_atoms(const BoolExpr& e, std::map<std::string, Atom>& out) {
  if (e.kind() == ExprKind::Atom) {
    out.emplace(e.atom().text(), e.atom());
    return;
  }
  for (const auto& c : e.children()) collect_atoms(c, out);
}

void collect_refs(const BoolExpr& e, std::vector<std::string>& out) {
  if (e.kind() == ExprKind::FragmentRef) {
    out.push_back(e.ref_name());
    return;
  }
  for (const auto& c : e.children()) collect_refs(c, out);
}

// ---------------------------------------------------------------------------
// Requirement fields
// ---------------------------------------------------------------------------

const char* to_string(ConditionClause::Keyword keyword) {
  return keyword == ConditionClause::Keyword::When ? "when" : "if";
}

std::string Scope::to_text() const {
  switch (kind) {
    case Kind::Global: return {};
    case Kind::In: return "in " + mode->text();
    case Kind::Before: return "before " + mode->text();
    case Kind::After: return "after " + mode->text();
  }
  return {};
}

std::string Timing::to_text() const {
  switch (kind) {
    case Kind::Default: return {};
    case Kind::Immediately: return "immediately";
    case Kind::Always: return "always";
    case Kind::Never: return "never";
    case Kind::Eventually: return "eventually";
    case Kind::Until: return "until (" + fretfrag::to_text(*stop) + ")";
    case Kind::Within: return "within " + std::to_string(ticks) + " ticks";
    case Kind::For: return "for " + std::to_string(ticks) + " ticks";
  }
  return {};
}

bool Requirement::operator==(const Requirement& other) const {
  return id == other.id && parent == other.parent && scope == other.scope &&
         conditions == other.conditions && uses == other.uses && component == other.component &&
         timing == other.timing && response == other.response && notes == other.notes;
}

bool Fragment::operator==(const Fragment& other) const {
  return name == other.name && scope == other.scope && conditions == other.conditions &&
         uses == other.uses && timing == other.timing && response == other.response &&
         notes == other.notes;
}

Timing normalize(const Timing& t) {
  Timing out = t;
  if (out.stop) out.stop = normalize(*out.stop);
  return out;
}

Requirement normalize(const Requirement& r) {
  Requirement out = r;
  out.span.reset();
  out.conditions.clear();
  if (!r.conditions.empty()) {
    std::vector<BoolExpr> exprs;
    for (const auto& c : r.conditions) exprs.push_back(c.expr);
    out.conditions.push_back(
        {ConditionClause::Keyword::If, normalize(BoolExpr::conjunction(std::move(exprs)))});
  }
  out.timing = normalize(r.timing);
  out.response = normalize(r.response);
  return out;
}

std::map<std::string, Atom> atoms_of(const Requirement& r) {
  std::map<std::string, Atom> out;
  if (r.scope.mode) out.emplace(r.scope.mode->text(), *r.scope.mode);
  for (const auto& c : r.conditions) collect_atoms(c.expr, out);
  if (r.timing.stop) collect_atoms(*r.timing.stop, out);
  collect_atoms(r.response, out);
  return out;
}

// ---------------------------------------------------------------------------
// RequirementSet
// ---------------------------------------------------------------------------

void RequirementSet::add(Requirement r) {
  if (requirement_index_.count(r.id)) {
    throw Error(ErrorKind::DuplicateId, "duplicate requirement id '" + r.id + "'", r.span, {r.id});
  }
  requirement_index_.emplace(r.id, requirements_.size());
  requirements_.push_back(std::move(r));
}

void RequirementSet::add(Fragment f) {
  if (fragment_index_.count(f.name)) {
    throw Error(ErrorKind::DuplicateId, "duplicate fragment name '" + f.name + "'", f.span,
                {f.name});
  }
  fragment_index_.emplace(f.name, fragments_.size());
  fragments_.push_back(std::move(f));
}

void RequirementSet::replace(Requirement r) {
  auto it = requirement_index_.find(r.id);
  if (it == requirement_index_.end()) {
    throw Error(ErrorKind::UnknownRequirement, "no requirement '" + r.id + "'", r.span, {r.id});
  }
  requirements_[it->second] = std::move(r);
}

const Requirement* RequirementSet::find_requirement(std::string_view id) const {
  auto it = requirement_index_.find(std::string(id));
  return it == requirement_index_.end() ? nullptr : &requirements_[it->second];
}

const Fragment* RequirementSet::find_fragment(std::string_view name) const {
  auto it = fragment_index_.find(std::string(name));
  return it == fragment_index_.end() ? nullptr : &fragments_[it->second];
}

const Requirement& RequirementSet::requirement(std::string_view id) const {
  if (const auto* r = find_requirement(id)) return *r;
  throw Error(ErrorKind::UnknownRequirement, "no requirement '" + std::string(id) + "'",
              std::nullopt, {std::string(id)});
}

bool RequirementSet::operator==(const RequirementSet& other) const {
  return requirements_ == other.requirements_ && fragments_ == other.fragments_ &&
         trailing_notes == other.trailing_notes;
}

namespace {

struct RefSite {
  std::string name;
  std::optional<SourceSpan> span;
};

void collect_ref_sites(const BoolExpr& e, std::vector<RefSite>& out) {
  if (e.kind() == ExprKind::FragmentRef) {
    out.push_back({e.ref_name(), e.span()});
    return;
  }
  for (const auto& c : e.children()) collect_ref_sites(c, out);
}

template <class Decl>
std::vector<RefSite> ref_sites(const Decl& d) {
  std::vector<RefSite> out;
  for (const auto& u : d.uses) out.push_back({u.name, u.span});
  for (const auto& c : d.conditions) collect_ref_sites(c.expr, out);
  if (d.timing.stop) collect_ref_sites(*d.timing.stop, out);
  if constexpr (std::is_same_v<Decl, Requirement>) {
    collect_ref_sites(d.response, out);
  } else if (d.response) {
    collect_ref_sites(*d.response, out);
  }
  return out;
}

template <class Decl>
void collect_decl_atoms(const Decl& d, std::map<std::string, Atom>& out) {
  if (d.scope.mode) out.emplace(d.scope.mode->text(), *d.scope.mode);
  for (const auto& c : d.conditions) collect_atoms(c.expr, out);
  if (d.timing.stop) collect_atoms(*d.timing.stop, out);
  if constexpr (std::is_same_v<Decl, Requirement>) {
    collect_atoms(d.response, out);
  } else if (d.response) {
    collect_atoms(*d.response, out);
  }
}

}  // namespace

std::map<std::string, Atom> atoms_of(const RequirementSet& set) {
  std::map<std::string, Atom> out;
  for (const auto& r : set.requirements()) collect_decl_atoms(r, out);
  for (const auto& f : set.fragments()) collect_decl_atoms(f, out);
  return out;
}

void validate(const RequirementSet& set) {
  auto check_refs = [&](const std::vector<RefSite>& sites) {
    for (const auto& s : sites) {
      if (!set.find_fragment(s.name)) {
        throw Error(ErrorKind::UnknownFragment, "unknown fragment '@" + s.name + "'", s.span,
                    {s.name});
      }
    }
  };
  for (const auto& r : set.requirements()) {
    if (r.parent && !set.find_requirement(*r.parent)) {
      throw Error(ErrorKind::UnknownParent,
                  "requirement '" + r.id + "' names unknown parent '" + *r.parent + "'", r.span,
                  {*r.parent});
    }
    check_refs(ref_sites(r));
  }
  for (const auto& f : set.fragments()) {
    if (f.empty()) {
      throw Error(ErrorKind::Parse, "fragment '" + f.name + "' has an empty body", f.span,
                  {f.name});
    }
    check_refs(ref_sites(f));
  }

  const auto atoms = atoms_of(set);
  for (const auto& f : set.fragments()) {
    auto it = atoms.find(f.name);
    if (it != atoms.end() && it->second.is_identifier()) {
      throw Error(ErrorKind::NameClash,
                  "fragment name '" + f.name + "' is also used as an atom", f.span, {f.name});
    }
  }

  // Cycle detection over fragment -> fragment references.
  enum class Mark { White, Grey, Black };
  std::unordered_map<std::string, Mark> marks;
  std::vector<std::string> stack;
  std::function<void(const Fragment&)> visit = [&](const Fragment& f) {
    marks[f.name] = Mark::Grey;
    stack.push_back(f.name);
    for (const auto& site : ref_sites(f)) {
      Mark m = marks.count(site.name) ? marks[site.name] : Mark::White;
      if (m == Mark::Grey) {
        auto begin = std::find(stack.begin(), stack.end(), site.name);
        std::vector<std::string> cycle(begin, stack.end());
        cycle.push_back(site.name);
        std::string path;
        for (std::size_t i = 0; i < cycle.size(); ++i) {
          if (i) path += " -> ";
          path += cycle[i];
        }
        throw Error(ErrorKind::CyclicFragment, "cyclic fragment references: " + path, site.span,
                    cycle);
      }
      if (m == Mark::White) visit(*set.find_fragment(site.name));
    }
    stack.pop_back();
    marks[f.name] = Mark::Black;
  };
  for (const auto& f : set.fragments()) {
    if (!marks.count(f.name)) visit(f);
  }
}

}  // namespace fretfrag
