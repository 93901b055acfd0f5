#include "fretfrag/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace fretfrag {

namespace {

enum class Tok {
  Name,
  Number,
  At,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Bang,
  Amp,
  Pipe,
  Arrow,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  Plus,
  Minus,
  Comment,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
  int endLine;
  int endCol;  // inclusive
  std::vector<std::string> comments;  // comment lines directly preceding the token
};

constexpr std::array kKeywords = {
    "requirement", "fragment", "parent",   "shall",      "satisfy", "when",
    "if",          "in",       "before",   "after",      "immediately",
    "always",      "never",    "eventually", "until",    "within",  "for",
    "ticks",
};

bool is_keyword(std::string_view s) {
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Name: return "'" + t.text + "'";
    case Tok::Number: return "number " + t.text;
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", line_, col_, line_, col_, {}});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  Token next() {
    const int line = line_;
    const int col = col_;
    auto make = [&](Tok kind, std::string text) {
      return Token{kind, std::move(text), line, col, line_, std::max(col_ - 1, 1), {}};
    };
    const char c = peek();
    if (c == '#') {
      std::string body;
      advance();
      while (pos_ < text_.size() && peek() != '\n') body += advance();
      if (!body.empty() && body.back() == '\r') body.pop_back();
      if (!body.empty() && body.front() == ' ') body.erase(0, 1);
      return make(Tok::Comment, body);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (name_char(peek()) || (peek() == '.' && name_char(peek(1)))) s += advance();
      return make(Tok::Name, s);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        s += advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
      }
      return make(Tok::Number, s);
    }
    advance();
    switch (c) {
      case '@': return make(Tok::At, "@");
      case '(': return make(Tok::LParen, "(");
      case ')': return make(Tok::RParen, ")");
      case '{': return make(Tok::LBrace, "{");
      case '}': return make(Tok::RBrace, "}");
      case ',': return make(Tok::Comma, ",");
      case '&': return make(Tok::Amp, "&");
      case '|': return make(Tok::Pipe, "|");
      case '+': return make(Tok::Plus, "+");
      case '-': return make(Tok::Minus, "-");
      case '!':
        if (peek() == '=') {
          advance();
          return make(Tok::Ne, "!=");
        }
        return make(Tok::Bang, "!");
      case '=':
        if (peek() == '>') {
          advance();
          return make(Tok::Arrow, "=>");
        }
        return make(Tok::Eq, "=");
      case '<':
        if (peek() == '=') {
          advance();
          return make(Tok::Le, "<=");
        }
        return make(Tok::Lt, "<");
      case '>':
        if (peek() == '=') {
          advance();
          return make(Tok::Ge, ">=");
        }
        return make(Tok::Gt, ">");
      default:
        break;
    }
    throw Error(ErrorKind::Parse, std::string("unexpected character '") + c + "'",
                SourceSpan{file_, line, col, line, col});
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, std::string file) : file_(file) {
    std::vector<std::string> pending;
    for (auto& t : Lexer(text, std::move(file)).run()) {
      if (t.kind == Tok::Comment) {
        pending.push_back(std::move(t.text));
        continue;
      }
      t.comments = std::move(pending);
      pending.clear();
      tokens_.push_back(std::move(t));
    }
  }

  RequirementSet parse_file() {
    RequirementSet set;
    while (true) {
      std::vector<std::string> notes = cur().comments;
      if (at(Tok::End)) {
        set.trailing_notes = std::move(notes);
        break;
      }
      if (at_keyword("requirement")) {
        Requirement r = parse_requirement();
        r.notes = std::move(notes);
        set.add(std::move(r));
      } else if (at_keyword("fragment")) {
        Fragment f = parse_fragment_decl();
        f.notes = std::move(notes);
        set.add(std::move(f));
      } else {
        fail("expected 'requirement' or 'fragment'");
      }
    }
    validate(set);
    return set;
  }

  Fragment parse_single_fragment() {
    std::vector<std::string> notes = cur().comments;
    if (!at_keyword("fragment")) fail("expected 'fragment'");
    Fragment f = parse_fragment_decl();
    f.notes = std::move(notes);
    if (!at(Tok::End)) fail("expected end of input after fragment");
    if (f.empty()) {
      throw Error(ErrorKind::Parse, "fragment '" + f.name + "' has an empty body", f.span);
    }
    return f;
  }

  BoolExpr parse_standalone_expr() {
    BoolExpr e = parse_expr();
    if (!at(Tok::End)) fail("expected end of expression");
    return e;
  }

 private:
  // -- token helpers -------------------------------------------------------

  const Token& cur() const { return tokens_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Name) && cur().text == kw; }

  const Token& bump() {
    const Token& t = tokens_[pos_];
    if (t.kind != Tok::End) ++pos_;
    return t;
  }

  SourceSpan span_of(const Token& t) const {
    return SourceSpan{file_, t.line, t.col, t.endLine, t.endCol};
  }

  SourceSpan span_from(const Token& start) const {
    const Token& last = tokens_[pos_ > 0 ? pos_ - 1 : 0];
    return SourceSpan{file_, start.line, start.col, last.endLine, last.endCol};
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Parse, what + ", found " + describe(cur()), span_of(cur()));
  }

  const Token& expect(Tok k, std::string_view what) {
    if (!at(k)) fail("expected " + std::string(what));
    return bump();
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("expected '" + std::string(kw) + "'");
    bump();
  }

  std::string expect_identifier(std::string_view what) {
    if (!at(Tok::Name)) fail("expected " + std::string(what));
    const Token& t = cur();
    if (is_keyword(t.text)) fail("expected " + std::string(what) + " (reserved word)");
    if (!is_identifier(t.text)) {
      throw Error(ErrorKind::Parse, "'" + t.text + "' is not a valid " + std::string(what),
                  span_of(t));
    }
    bump();
    return t.text;
  }

  std::string expect_requirement_id() {
    if (!at(Tok::Name) || is_keyword(cur().text)) fail("expected requirement id");
    return bump().text;
  }

  // -- declarations --------------------------------------------------------

  bool at_scope() const {
    return at_keyword("in") || at_keyword("before") || at_keyword("after");
  }

  Scope parse_scope() {
    const std::string kw = bump().text;
    Atom mode = Atom::identifier(expect_identifier("scope mode"));
    if (kw == "in") return Scope::in(std::move(mode));
    if (kw == "before") return Scope::before(std::move(mode));
    return Scope::after(std::move(mode));
  }

  bool at_timing() const {
    return at_keyword("immediately") || at_keyword("always") || at_keyword("never") ||
           at_keyword("eventually") || at_keyword("until") || at_keyword("within") ||
           at_keyword("for");
  }

  Timing parse_timing() {
    const std::string kw = bump().text;
    if (kw == "immediately") return Timing::of(Timing::Kind::Immediately);
    if (kw == "always") return Timing::of(Timing::Kind::Always);
    if (kw == "never") return Timing::of(Timing::Kind::Never);
    if (kw == "eventually") return Timing::of(Timing::Kind::Eventually);
    if (kw == "until") {
      expect(Tok::LParen, "'(' after 'until'");
      BoolExpr stop = parse_expr();
      expect(Tok::RParen, "')'");
      return Timing::until(std::move(stop));
    }
    const Token& n = cur();
    if (!at(Tok::Number) || n.text.find('.') != std::string::npos) {
      fail("expected tick count after '" + kw + "'");
    }
    int ticks = 0;
    try {
      ticks = std::stoi(n.text);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "tick count out of range", span_of(n));
    }
    if (ticks < 1) throw Error(ErrorKind::Parse, "tick count must be at least 1", span_of(n));
    bump();
    expect_keyword("ticks");
    return kw == "within" ? Timing::within(ticks) : Timing::for_ticks(ticks);
  }

  template <class Decl>
  void parse_items(Decl& d) {
    while (true) {
      if (at_keyword("when") || at_keyword("if")) {
        auto kw = bump().text == "when" ? ConditionClause::Keyword::When
                                        : ConditionClause::Keyword::If;
        expect(Tok::LParen, "'(' after condition keyword");
        BoolExpr e = parse_expr();
        expect(Tok::RParen, "')'");
        d.conditions.push_back({kw, std::move(e)});
      } else if (at(Tok::At)) {
        const Token& at_tok = bump();
        const std::string name = expect_identifier("fragment name");
        d.uses.push_back({name, span_from(at_tok)});
      } else {
        return;
      }
    }
  }

  BoolExpr parse_parenthesized() {
    expect(Tok::LParen, "'('");
    BoolExpr e = parse_expr();
    expect(Tok::RParen, "')'");
    return e;
  }

  Requirement parse_requirement() {
    const Token& start = cur();
    bump();
    Requirement r;
    r.id = expect_requirement_id();
    if (at_keyword("parent")) {
      bump();
      r.parent = expect_requirement_id();
    }
    expect(Tok::LBrace, "'{'");
    if (at_scope()) r.scope = parse_scope();
    parse_items(r);
    r.component = expect_identifier("component name");
    expect_keyword("shall");
    if (at_timing()) r.timing = parse_timing();
    if (at_keyword("satisfy")) bump();
    r.response = parse_parenthesized();
    expect(Tok::RBrace, "'}'");
    r.span = span_from(start);
    return r;
  }

  Fragment parse_fragment_decl() {
    const Token& start = cur();
    bump();
    Fragment f;
    f.name = expect_identifier("fragment name");
    expect(Tok::LBrace, "'{'");
    if (at_scope()) f.scope = parse_scope();
    parse_items(f);
    if (at_timing()) f.timing = parse_timing();
    if (at_keyword("satisfy")) {
      bump();
      f.response = parse_parenthesized();
    }
    expect(Tok::RBrace, "'}'");
    f.span = span_from(start);
    return f;
  }

  // -- expressions ---------------------------------------------------------

  BoolExpr parse_expr() {
    const Token& start = cur();
    BoolExpr lhs = parse_or();
    if (at(Tok::Arrow)) {
      bump();
      BoolExpr rhs = parse_expr();
      return BoolExpr::implies(std::move(lhs), std::move(rhs), span_from(start));
    }
    return lhs;
  }

  BoolExpr parse_or() {
    const Token& start = cur();
    std::vector<BoolExpr> ops{parse_and()};
    while (at(Tok::Pipe)) {
      bump();
      ops.push_back(parse_and());
    }
    if (ops.size() == 1) return ops.front();
    return BoolExpr::disjunction(std::move(ops), span_from(start));
  }

  BoolExpr parse_and() {
    const Token& start = cur();
    std::vector<BoolExpr> ops{parse_unary()};
    while (at(Tok::Amp)) {
      bump();
      ops.push_back(parse_unary());
    }
    if (ops.size() == 1) return ops.front();
    return BoolExpr::conjunction(std::move(ops), span_from(start));
  }

  BoolExpr parse_unary() {
    const Token& start = cur();
    if (at(Tok::Bang)) {
      bump();
      BoolExpr inner = parse_unary();
      return BoolExpr::negate(std::move(inner), span_from(start));
    }
    return parse_primary();
  }

  BoolExpr parse_primary() {
    const Token& start = cur();
    if (at(Tok::LParen)) {
      bump();
      BoolExpr e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::At)) {
      bump();
      std::string name = expect_identifier("fragment name");
      return BoolExpr::ref(std::move(name), span_from(start));
    }
    if (!at(Tok::Name) && !at(Tok::Number) && !at(Tok::Minus)) fail("expected expression");
    Term lhs = parse_term();
    if (auto op = relop()) {
      bump();
      Term rhs = parse_term();
      return BoolExpr::atom(Atom::comparison(std::move(lhs), *op, std::move(rhs)),
                            span_from(start));
    }
    if (lhs.kind != Term::Kind::Identifier) {
      throw Error(ErrorKind::Parse, "term '" + lhs.to_text() + "' used as a condition",
                  span_from(start));
    }
    if (is_keyword(lhs.name)) {
      throw Error(ErrorKind::Parse, "reserved word '" + lhs.name + "' used as an atom",
                  span_from(start));
    }
    return BoolExpr::atom(Atom::identifier(lhs.name), span_from(start));
  }

  std::optional<RelOp> relop() const {
    switch (cur().kind) {
      case Tok::Lt: return RelOp::Lt;
      case Tok::Le: return RelOp::Le;
      case Tok::Gt: return RelOp::Gt;
      case Tok::Ge: return RelOp::Ge;
      case Tok::Eq: return RelOp::Eq;
      case Tok::Ne: return RelOp::Ne;
      default: return std::nullopt;
    }
  }

  Term parse_term() {
    Term t = parse_term_primary();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      bool plus = bump().kind == Tok::Plus;
      Term rhs = parse_term_primary();
      t = plus ? Term::add(std::move(t), std::move(rhs)) : Term::sub(std::move(t), std::move(rhs));
    }
    return t;
  }

  Term parse_term_primary() {
    if (at(Tok::Minus)) {
      bump();
      if (!at(Tok::Number)) fail("expected number after unary '-'");
      return Term::number("-" + bump().text);
    }
    if (at(Tok::Number)) return Term::number(bump().text);
    std::string name = expect_identifier("term");
    if (at(Tok::LParen)) {
      bump();
      std::vector<Term> args;
      if (!at(Tok::RParen)) {
        args.push_back(parse_term());
        while (at(Tok::Comma)) {
          bump();
          args.push_back(parse_term());
        }
      }
      expect(Tok::RParen, "')' closing argument list");
      return Term::apply(std::move(name), std::move(args));
    }
    return Term::identifier(std::move(name));
  }

  std::string file_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void print_notes(const std::vector<std::string>& notes, std::string& out) {
  for (const auto& n : notes) {
    out += n.empty() ? "#\n" : "# " + n + "\n";
  }
}

template <class Decl>
void print_items(const Decl& d, std::string& out) {
  if (!d.scope.is_global()) out += "  " + d.scope.to_text() + "\n";
  for (const auto& c : d.conditions) {
    out += "  ";
    out += to_string(c.keyword);
    out += " (" + to_text(c.expr) + ")\n";
  }
  for (const auto& u : d.uses) out += "  @" + u.name + "\n";
}

}  // namespace

RequirementSet parse(std::string_view text, std::string_view file) {
  return Parser(text, std::string(file)).parse_file();
}

Fragment parse_fragment(std::string_view text, std::string_view file) {
  return Parser(text, std::string(file)).parse_single_fragment();
}

BoolExpr parse_expr(std::string_view text) {
  return Parser(text, "").parse_standalone_expr();
}

std::string print(const Requirement& r) {
  std::string out;
  print_notes(r.notes, out);
  out += "requirement " + r.id;
  if (r.parent) out += " parent " + *r.parent;
  out += " {\n";
  print_items(r, out);
  out += "  " + r.component + " shall ";
  if (!r.timing.is_default()) out += r.timing.to_text() + " ";
  out += "satisfy (" + to_text(r.response) + ")\n}\n";
  return out;
}

std::string print(const Fragment& f) {
  std::string out;
  print_notes(f.notes, out);
  out += "fragment " + f.name + " {\n";
  print_items(f, out);
  if (!f.timing.is_default()) out += "  " + f.timing.to_text() + "\n";
  if (f.response) out += "  satisfy (" + to_text(*f.response) + ")\n";
  out += "}\n";
  return out;
}

std::string print(const RequirementSet& set) {
  std::string out;
  bool first = true;
  auto sep = [&] {
    if (!first) out += '\n';
    first = false;
  };
  for (const auto& f : set.fragments()) {
    sep();
    out += print(f);
  }
  for (const auto& r : set.requirements()) {
    sep();
    out += print(r);
  }
  if (!set.trailing_notes.empty()) {
    sep();
    print_notes(set.trailing_notes, out);
  }
  return out;
}

}  // namespace fretfrag
