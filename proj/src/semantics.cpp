#include "fretfrag/semantics.hpp"

#include <algorithm>
#include <array>
#include <bit>

namespace fretfrag {

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

Trace::Trace(std::vector<Atom> atoms, std::vector<std::vector<bool>> steps)
    : atoms_(std::move(atoms)), steps_(std::move(steps)) {
  if (steps_.empty()) throw Error(ErrorKind::InvalidArgument, "trace must have at least one tick");
  for (const auto& s : steps_) {
    if (s.size() != atoms_.size()) {
      throw Error(ErrorKind::InvalidArgument, "trace step width differs from atom count");
    }
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) index_.emplace(atoms_[i].text(), i);
}

std::optional<std::size_t> Trace::index_of(const std::string& atom_text) const {
  auto it = index_.find(atom_text);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Trace::value(const Atom& atom, int tick) const {
  auto i = index_of(atom.text());
  if (!i) {
    throw Error(ErrorKind::MissingAtom, "trace has no atom '" + atom.text() + "'", std::nullopt,
                {atom.text()});
  }
  return steps_.at(static_cast<std::size_t>(tick))[*i];
}

std::string Trace::to_text() const {
  std::string out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    out += atoms_[i].text() + ':';
    for (const auto& s : steps_) out += s[i] ? " 1" : " 0";
    out += '\n';
  }
  return out;
}

bool eval(const BoolExpr& e, const Trace& trace, int tick) {
  switch (e.kind()) {
    case ExprKind::Atom:
      return trace.value(e.atom(), tick);
    case ExprKind::FragmentRef:
      throw Error(ErrorKind::InvalidArgument,
                  "fragment reference '@" + e.ref_name() + "' must be inlined before evaluation",
                  e.span());
    case ExprKind::Not:
      return !eval(e.children()[0], trace, tick);
    case ExprKind::And:
      for (const auto& c : e.children()) {
        if (!eval(c, trace, tick)) return false;
      }
      return true;
    case ExprKind::Or:
      for (const auto& c : e.children()) {
        if (eval(c, trace, tick)) return true;
      }
      return false;
    case ExprKind::Implies:
      return !eval(e.children()[0], trace, tick) || eval(e.children()[1], trace, tick);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Template bank
// ---------------------------------------------------------------------------

std::vector<Interval> segments(const Scope& scope, const std::vector<bool>& mode_truth, int n) {
  auto mode = [&](int t) { return mode_truth.at(static_cast<std::size_t>(t)); };
  switch (scope.kind) {
    case Scope::Kind::Global:
      return {{0, n}};
    case Scope::Kind::In: {
      std::vector<Interval> out;
      int t = 0;
      while (t < n) {
        if (!mode(t)) {
          ++t;
          continue;
        }
        int b = t;
        while (t < n && mode(t)) ++t;
        out.push_back({b, t});
      }
      return out;
    }
    case Scope::Kind::Before: {
      int first = 0;
      while (first < n && !mode(first)) ++first;
      if (first == 0) return {};
      return {{0, first}};
    }
    case Scope::Kind::After: {
      int t = 0;
      while (t < n && !mode(t)) ++t;
      if (t == n) return {};
      while (t < n && mode(t)) ++t;
      if (t == n) return {};
      return {{t, n}};
    }
  }
  return {};
}

namespace {

bool conjunction_at(std::span<const ConditionClause> conditions, const Trace& trace, int tick) {
  return std::all_of(conditions.begin(), conditions.end(),
                     [&](const ConditionClause& c) { return eval(c.expr, trace, tick); });
}

}  // namespace

std::vector<int> triggers(std::span<const ConditionClause> conditions, Interval segment,
                          const Trace& trace) {
  if (segment.begin >= segment.end) return {};
  if (conditions.empty()) return {segment.begin};
  std::vector<int> out;
  bool previous = false;
  for (int t = segment.begin; t < segment.end; ++t) {
    bool now = conjunction_at(conditions, trace, t);
    if (now && (t == segment.begin || !previous)) out.push_back(t);
    previous = now;
  }
  return out;
}

bool obligation_holds(const Timing& timing, const BoolExpr& response, int trigger,
                      Interval segment, const Trace& trace) {
  const int e = segment.end;
  auto holds = [&](int j) { return eval(response, trace, j); };
  auto all_in = [&](int from, int to) {
    for (int j = from; j < to; ++j) {
      if (!holds(j)) return false;
    }
    return true;
  };
  auto some_in = [&](int from, int to) {
    for (int j = from; j < to; ++j) {
      if (holds(j)) return true;
    }
    return false;
  };
  // Last tick (exclusive) of a bounded window [t, t+n] clipped to the segment.
  auto window_end = [&](int ticks) {
    return static_cast<int>(std::min<long long>(static_cast<long long>(trigger) + ticks + 1, e));
  };

  switch (timing.kind) {
    case Timing::Kind::Default:
    case Timing::Kind::Always:
      return all_in(trigger, e);
    case Timing::Kind::Immediately:
      return holds(trigger);
    case Timing::Kind::Never:
      return !some_in(trigger, e);
    case Timing::Kind::Eventually:
      return some_in(trigger, e);
    case Timing::Kind::Until: {
      int stop = trigger;
      while (stop < e && !eval(*timing.stop, trace, stop)) ++stop;
      return all_in(trigger, stop);
    }
    case Timing::Kind::Within:
      return some_in(trigger, window_end(timing.ticks));
    case Timing::Kind::For:
      return all_in(trigger, window_end(timing.ticks));
  }
  return false;
}

bool evaluate(const Requirement& req, const Trace& trace) {
  for (const auto& [text, atom] : atoms_of(req)) {
    if (!trace.index_of(text)) {
      throw Error(ErrorKind::MissingAtom,
                  "trace has no atom '" + text + "' used by requirement '" + req.id + "'",
                  std::nullopt, {text});
    }
  }
  const int n = trace.length();
  std::vector<bool> mode_truth(static_cast<std::size_t>(n), false);
  if (req.scope.mode) {
    for (int t = 0; t < n; ++t) mode_truth[static_cast<std::size_t>(t)] = trace.value(*req.scope.mode, t);
  }
  for (const Interval& seg : segments(req.scope, mode_truth, n)) {
    for (int t : triggers(req.conditions, seg, trace)) {
      if (!obligation_holds(req.timing, req.response, t, seg, trace)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// LtlFormula
// ---------------------------------------------------------------------------

struct LtlFormula::Node {
  LtlKind kind;
  std::optional<Atom> atom;
  int bound = 0;
  std::vector<LtlFormula> children;
};

LtlFormula LtlFormula::atom(Atom a) {
  return LtlFormula(std::make_shared<const Node>(Node{LtlKind::Atom, std::move(a), 0, {}}));
}

LtlFormula LtlFormula::constant(bool value) {
  return LtlFormula(std::make_shared<const Node>(
      Node{value ? LtlKind::True : LtlKind::False, std::nullopt, 0, {}}));
}

#define FRETFRAG_LTL_NODE(kind, bound, ...)                 \
  LtlFormula(std::make_shared<const Node>(                  \
      Node{kind, std::nullopt, bound, std::vector<LtlFormula>{__VA_ARGS__}}))

LtlFormula LtlFormula::negate(LtlFormula f) { return FRETFRAG_LTL_NODE(LtlKind::Not, 0, std::move(f)); }

LtlFormula LtlFormula::conjunction(std::vector<LtlFormula> operands) {
  if (operands.empty()) return constant(true);
  if (operands.size() == 1) return std::move(operands.front());
  return LtlFormula(
      std::make_shared<const Node>(Node{LtlKind::And, std::nullopt, 0, std::move(operands)}));
}

LtlFormula LtlFormula::disjunction(std::vector<LtlFormula> operands) {
  if (operands.empty()) return constant(false);
  if (operands.size() == 1) return std::move(operands.front());
  return LtlFormula(
      std::make_shared<const Node>(Node{LtlKind::Or, std::nullopt, 0, std::move(operands)}));
}

LtlFormula LtlFormula::implies(LtlFormula lhs, LtlFormula rhs) {
  return FRETFRAG_LTL_NODE(LtlKind::Implies, 0, std::move(lhs), std::move(rhs));
}
LtlFormula LtlFormula::next(LtlFormula f) { return FRETFRAG_LTL_NODE(LtlKind::Next, 0, std::move(f)); }
LtlFormula LtlFormula::globally(LtlFormula f) {
  return FRETFRAG_LTL_NODE(LtlKind::Globally, 0, std::move(f));
}
LtlFormula LtlFormula::finally(LtlFormula f) {
  return FRETFRAG_LTL_NODE(LtlKind::Finally, 0, std::move(f));
}
LtlFormula LtlFormula::until(LtlFormula lhs, LtlFormula rhs) {
  return FRETFRAG_LTL_NODE(LtlKind::Until, 0, std::move(lhs), std::move(rhs));
}
LtlFormula LtlFormula::weak_until(LtlFormula lhs, LtlFormula rhs) {
  return FRETFRAG_LTL_NODE(LtlKind::WeakUntil, 0, std::move(lhs), std::move(rhs));
}
LtlFormula LtlFormula::bounded_finally(int bound, LtlFormula f) {
  return FRETFRAG_LTL_NODE(LtlKind::BoundedFinally, bound, std::move(f));
}
LtlFormula LtlFormula::bounded_globally(int bound, LtlFormula f) {
  return FRETFRAG_LTL_NODE(LtlKind::BoundedGlobally, bound, std::move(f));
}

#undef FRETFRAG_LTL_NODE

LtlFormula LtlFormula::from_expr(const BoolExpr& e) {
  std::vector<LtlFormula> kids;
  for (const auto& c : e.children()) kids.push_back(from_expr(c));
  switch (e.kind()) {
    case ExprKind::Atom: return atom(e.atom());
    case ExprKind::FragmentRef:
      throw Error(ErrorKind::InvalidArgument,
                  "fragment reference '@" + e.ref_name() + "' must be inlined first", e.span());
    case ExprKind::Not: return negate(std::move(kids[0]));
    case ExprKind::And: return conjunction(std::move(kids));
    case ExprKind::Or: return disjunction(std::move(kids));
    case ExprKind::Implies: return implies(std::move(kids[0]), std::move(kids[1]));
  }
  return constant(false);
}

LtlKind LtlFormula::kind() const noexcept { return node_->kind; }
const Atom& LtlFormula::atom() const { return *node_->atom; }
int LtlFormula::bound() const noexcept { return node_->bound; }
std::span<const LtlFormula> LtlFormula::children() const noexcept { return node_->children; }

bool LtlFormula::operator==(const LtlFormula& other) const {
  if (node_ == other.node_) return true;
  if (node_->kind != other.node_->kind || node_->bound != other.node_->bound) return false;
  if (node_->kind == LtlKind::Atom) return *node_->atom == *other.node_->atom;
  return node_->children == other.node_->children;
}

namespace {

int ltl_precedence(const LtlFormula& f) {
  switch (f.kind()) {
    case LtlKind::Implies: return 1;
    case LtlKind::Or: return 2;
    case LtlKind::And: return 3;
    case LtlKind::Until:
    case LtlKind::WeakUntil: return 4;
    case LtlKind::Not:
    case LtlKind::Next:
    case LtlKind::Globally:
    case LtlKind::Finally:
    case LtlKind::BoundedFinally:
    case LtlKind::BoundedGlobally: return 5;
    default: return 6;
  }
}

void print_ltl(const LtlFormula& f, bool operand, std::string& out);

void print_ltl_child(const LtlFormula& c, bool parens, std::string& out) {
  if (parens) {
    out += '(';
    print_ltl(c, false, out);
    out += ')';
  } else {
    print_ltl(c, true, out);
  }
}

void print_ltl(const LtlFormula& f, bool operand, std::string& out) {
  const int own = ltl_precedence(f);
  switch (f.kind()) {
    case LtlKind::Atom:
      out += operand && !f.atom().is_identifier() ? "(" + f.atom().text() + ")" : f.atom().text();
      return;
    case LtlKind::True: out += "true"; return;
    case LtlKind::False: out += "false"; return;
    case LtlKind::Not:
      out += '!';
      print_ltl_child(f.children()[0], ltl_precedence(f.children()[0]) < 5, out);
      return;
    case LtlKind::Next:
    case LtlKind::Globally:
    case LtlKind::Finally:
    case LtlKind::BoundedFinally:
    case LtlKind::BoundedGlobally: {
      switch (f.kind()) {
        case LtlKind::Next: out += "X "; break;
        case LtlKind::Globally: out += "G "; break;
        case LtlKind::Finally: out += "F "; break;
        case LtlKind::BoundedFinally: out += "F<=" + std::to_string(f.bound()) + " "; break;
        default: out += "G<=" + std::to_string(f.bound()) + " "; break;
      }
      print_ltl_child(f.children()[0], ltl_precedence(f.children()[0]) < 5, out);
      return;
    }
    case LtlKind::And:
    case LtlKind::Or: {
      const char* sep = f.kind() == LtlKind::And ? " & " : " | ";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += sep;
        print_ltl_child(f.children()[i], ltl_precedence(f.children()[i]) <= own, out);
      }
      return;
    }
    case LtlKind::Until:
    case LtlKind::WeakUntil:
      print_ltl_child(f.children()[0], ltl_precedence(f.children()[0]) <= own, out);
      out += f.kind() == LtlKind::Until ? " U " : " W ";
      print_ltl_child(f.children()[1], ltl_precedence(f.children()[1]) <= own, out);
      return;
    case LtlKind::Implies:
      print_ltl_child(f.children()[0], ltl_precedence(f.children()[0]) <= own, out);
      out += " -> ";
      print_ltl_child(f.children()[1], ltl_precedence(f.children()[1]) < own, out);
      return;
  }
}

}  // namespace

std::string to_text(const LtlFormula& f) {
  std::string out;
  print_ltl(f, false, out);
  return out;
}

LtlFormula to_ltl(const Requirement& req) {
  if (!req.scope.is_global()) {
    throw Error(ErrorKind::UnsupportedScope,
                "formula emission supports only global scope (requirement '" + req.id + "')",
                req.span);
  }
  if (!req.uses.empty()) {
    throw Error(ErrorKind::InvalidArgument,
                "requirement '" + req.id + "' must be inlined before formula emission", req.span);
  }
  const LtlFormula response = LtlFormula::from_expr(req.response);
  LtlFormula body = [&] {
    switch (req.timing.kind) {
      case Timing::Kind::Default:
      case Timing::Kind::Always: return LtlFormula::globally(response);
      case Timing::Kind::Immediately: return response;
      case Timing::Kind::Never: return LtlFormula::globally(LtlFormula::negate(response));
      case Timing::Kind::Eventually: return LtlFormula::finally(response);
      case Timing::Kind::Until:
        return LtlFormula::weak_until(response, LtlFormula::from_expr(*req.timing.stop));
      case Timing::Kind::Within: return LtlFormula::bounded_finally(req.timing.ticks, response);
      case Timing::Kind::For: return LtlFormula::bounded_globally(req.timing.ticks, response);
    }
    return response;
  }();
  if (req.conditions.empty()) return body;

  std::vector<LtlFormula> clauses;
  for (const auto& c : req.conditions) clauses.push_back(LtlFormula::from_expr(c.expr));
  const LtlFormula cond = LtlFormula::conjunction(std::move(clauses));
  LtlFormula initial = LtlFormula::implies(cond, body);
  LtlFormula rising = LtlFormula::globally(LtlFormula::implies(
      LtlFormula::conjunction({LtlFormula::negate(cond), LtlFormula::next(cond)}),
      LtlFormula::next(body)));
  return LtlFormula::conjunction({std::move(initial), std::move(rising)});
}

bool eval_ltl(const LtlFormula& f, const Trace& trace, int i) {
  const int n = trace.length();
  auto sub = [&](std::size_t k, int pos) { return eval_ltl(f.children()[k], trace, pos); };
  auto clip = [&](int bound) {
    return static_cast<int>(std::min<long long>(static_cast<long long>(i) + bound, n - 1));
  };
  switch (f.kind()) {
    case LtlKind::Atom: return trace.value(f.atom(), i);
    case LtlKind::True: return true;
    case LtlKind::False: return false;
    case LtlKind::Not: return !sub(0, i);
    case LtlKind::And:
      for (std::size_t k = 0; k < f.children().size(); ++k) {
        if (!sub(k, i)) return false;
      }
      return true;
    case LtlKind::Or:
      for (std::size_t k = 0; k < f.children().size(); ++k) {
        if (sub(k, i)) return true;
      }
      return false;
    case LtlKind::Implies: return !sub(0, i) || sub(1, i);
    case LtlKind::Next: return i + 1 < n && sub(0, i + 1);
    case LtlKind::Globally:
      for (int j = i; j < n; ++j) {
        if (!sub(0, j)) return false;
      }
      return true;
    case LtlKind::Finally:
      for (int j = i; j < n; ++j) {
        if (sub(0, j)) return true;
      }
      return false;
    case LtlKind::Until:
    case LtlKind::WeakUntil:
      for (int j = i; j < n; ++j) {
        if (sub(1, j)) return true;
        if (!sub(0, j)) return false;
      }
      return f.kind() == LtlKind::WeakUntil;
    case LtlKind::BoundedFinally:
      for (int j = i; j <= clip(f.bound()); ++j) {
        if (sub(0, j)) return true;
      }
      return false;
    case LtlKind::BoundedGlobally:
      for (int j = i; j <= clip(f.bound()); ++j) {
        if (!sub(0, j)) return false;
      }
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// CompiledRequirement
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t range_mask(int from, int to) {
  if (from >= to) return 0;
  const std::uint64_t upper = to >= 64 ? ~0ULL : (1ULL << to) - 1;
  const std::uint64_t lower = (1ULL << from) - 1;
  return upper & ~lower;
}

int lowest_bit(std::uint64_t m) { return std::countr_zero(m); }

}  // namespace

std::vector<std::uint64_t> pack(const Trace& trace) {
  std::vector<std::uint64_t> masks(trace.atoms().size(), 0);
  for (int t = 0; t < trace.length(); ++t) {
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if (trace.steps()[static_cast<std::size_t>(t)][i]) masks[i] |= 1ULL << t;
    }
  }
  return masks;
}

CompiledRequirement::CompiledRequirement(const Requirement& req, const std::vector<Atom>& atoms)
    : scope_kind_(req.scope.kind), timing_(req.timing.kind), ticks_(req.timing.ticks) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < atoms.size(); ++i) index.emplace(atoms[i].text(), i);
  if (req.scope.mode) {
    auto it = index.find(req.scope.mode->text());
    if (it == index.end()) {
      throw Error(ErrorKind::MissingAtom, "no atom '" + req.scope.mode->text() + "'",
                  std::nullopt, {req.scope.mode->text()});
    }
    mode_index_ = it->second;
  }
  if (!req.conditions.empty()) {
    std::vector<BoolExpr> exprs;
    for (const auto& c : req.conditions) exprs.push_back(c.expr);
    Program p;
    compile(BoolExpr::conjunction(std::move(exprs)), index, p);
    condition_ = std::move(p);
  }
  if (req.timing.stop) {
    Program p;
    compile(*req.timing.stop, index, p);
    stop_ = std::move(p);
  }
  compile(req.response, index, response_);
}

void CompiledRequirement::compile(const BoolExpr& e,
                                  const std::unordered_map<std::string, std::size_t>& index,
                                  Program& out) {
  switch (e.kind()) {
    case ExprKind::Atom: {
      auto it = index.find(e.atom().text());
      if (it == index.end()) {
        throw Error(ErrorKind::MissingAtom, "no atom '" + e.atom().text() + "'", std::nullopt,
                    {e.atom().text()});
      }
      out.push_back({Op::Code::Load, static_cast<std::uint32_t>(it->second)});
      return;
    }
    case ExprKind::FragmentRef:
      throw Error(ErrorKind::InvalidArgument,
                  "fragment reference '@" + e.ref_name() + "' must be inlined first", e.span());
    case ExprKind::Not:
      compile(e.children()[0], index, out);
      out.push_back({Op::Code::Not, 0});
      return;
    case ExprKind::And:
    case ExprKind::Or:
      for (const auto& c : e.children()) compile(c, index, out);
      out.push_back({e.kind() == ExprKind::And ? Op::Code::And : Op::Code::Or,
                     static_cast<std::uint32_t>(e.children().size())});
      return;
    case ExprKind::Implies:
      compile(e.children()[0], index, out);
      compile(e.children()[1], index, out);
      out.push_back({Op::Code::Implies, 2});
      return;
  }
}

std::uint64_t CompiledRequirement::run(const Program& p, std::span<const std::uint64_t> masks,
                                       std::uint64_t all) {
  std::uint64_t small[128];
  std::vector<std::uint64_t> large;
  std::uint64_t* stack = small;
  if (p.size() > std::size(small)) {
    large.resize(p.size());
    stack = large.data();
  }
  std::size_t top = 0;
  for (const Op& op : p) {
    switch (op.code) {
      case Op::Code::Load:
        stack[top++] = masks[op.arg];
        break;
      case Op::Code::Not:
        stack[top - 1] = ~stack[top - 1] & all;
        break;
      case Op::Code::And: {
        std::uint64_t acc = all;
        for (std::uint32_t k = 0; k < op.arg; ++k) acc &= stack[--top];
        stack[top++] = acc;
        break;
      }
      case Op::Code::Or: {
        std::uint64_t acc = 0;
        for (std::uint32_t k = 0; k < op.arg; ++k) acc |= stack[--top];
        stack[top++] = acc;
        break;
      }
      case Op::Code::Implies: {
        std::uint64_t rhs = stack[--top];
        std::uint64_t lhs = stack[--top];
        stack[top++] = (~lhs | rhs) & all;
        break;
      }
    }
  }
  return top ? stack[top - 1] : 0;
}

bool CompiledRequirement::evaluate(std::span<const std::uint64_t> masks, int n) const {
  const std::uint64_t all = range_mask(0, n);
  const std::uint64_t response = run(response_, masks, all);
  const std::uint64_t cond = condition_ ? run(*condition_, masks, all) : 0;
  const std::uint64_t stop = stop_ ? run(*stop_, masks, all) : 0;

  auto obligation = [&](int t, int e) {
    switch (timing_) {
      case Timing::Kind::Default:
      case Timing::Kind::Always: return (~response & range_mask(t, e)) == 0;
      case Timing::Kind::Immediately: return ((response >> t) & 1ULL) != 0;
      case Timing::Kind::Never: return (response & range_mask(t, e)) == 0;
      case Timing::Kind::Eventually: return (response & range_mask(t, e)) != 0;
      case Timing::Kind::Until: {
        const std::uint64_t hits = stop & range_mask(t, e);
        const int s = hits ? lowest_bit(hits) : e;
        return (~response & range_mask(t, s)) == 0;
      }
      case Timing::Kind::Within:
      case Timing::Kind::For: {
        const int hi = static_cast<int>(std::min<long long>(static_cast<long long>(t) + ticks_ + 1, e));
        return timing_ == Timing::Kind::Within ? (response & range_mask(t, hi)) != 0
                                               : (~response & range_mask(t, hi)) == 0;
      }
    }
    return false;
  };

  auto check_segment = [&](int b, int e) {
    if (!condition_) return obligation(b, e);
    const std::uint64_t in_seg = cond & range_mask(b, e);
    std::uint64_t rising = in_seg & ~(in_seg << 1);
    while (rising) {
      const int t = lowest_bit(rising);
      if (!obligation(t, e)) return false;
      rising &= rising - 1;
    }
    return true;
  };

  const std::uint64_t mode = scope_kind_ == Scope::Kind::Global ? 0 : masks[mode_index_];
  switch (scope_kind_) {
    case Scope::Kind::Global:
      return check_segment(0, n);
    case Scope::Kind::In: {
      std::uint64_t rest = mode & all;
      while (rest) {
        const int b = lowest_bit(rest);
        const std::uint64_t gaps = ~rest & all & ~range_mask(0, b);
        const int e = gaps ? lowest_bit(gaps) : n;
        if (!check_segment(b, e)) return false;
        rest &= ~range_mask(b, e);
      }
      return true;
    }
    case Scope::Kind::Before: {
      const int first = mode ? lowest_bit(mode) : n;
      return first == 0 || check_segment(0, first);
    }
    case Scope::Kind::After: {
      if (!mode) return true;
      const int s = lowest_bit(mode);
      const std::uint64_t gaps = ~mode & all & ~range_mask(0, s);
      if (!gaps) return true;
      return check_segment(lowest_bit(gaps), n);
    }
  }
  return false;
}

}  // namespace fretfrag
