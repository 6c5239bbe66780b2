#include "psg/logic.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>
#include <utility>

namespace psg {

namespace {

bool is_keyword(std::string_view s) {
  return s == "true" || s == "false" || s == "forall" || s == "exists";
}

void require_identifier(const std::string& name) {
  if (!is_identifier(name)) {
    throw std::invalid_argument("not an identifier: '" + name + "'");
  }
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty() || is_keyword(s)) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char ch) {
    auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_' || c == '\'';
  });
}

Term Term::var(std::string name) {
  require_identifier(name);
  return Term(Kind::Var, std::move(name));
}

Term Term::constant(std::string name) {
  require_identifier(name);
  return Term(Kind::Const, std::move(name));
}

std::string_view connective_name(Connective c) {
  switch (c) {
    case Connective::Atom: return "atom";
    case Connective::True: return "true";
    case Connective::False: return "false";
    case Connective::Not: return "not";
    case Connective::And: return "and";
    case Connective::Or: return "or";
    case Connective::Imp: return "imp";
    case Connective::Forall: return "forall";
    case Connective::Exists: return "exists";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Formula nodes

struct Formula::Node {
  Connective kind;
  std::string name;  // predicate or bound variable
  std::vector<Term> args;
  std::optional<Formula> left;
  std::optional<Formula> right;
};

Formula Formula::atom(std::string pred, std::vector<Term> args) {
  require_identifier(pred);
  return Formula(std::make_shared<const Node>(Node{Connective::Atom, std::move(pred), std::move(args), {}, {}}));
}

Formula Formula::truth() {
  static const Formula t(std::make_shared<const Node>(Node{Connective::True, {}, {}, {}, {}}));
  return t;
}

Formula Formula::falsity() {
  static const Formula f(std::make_shared<const Node>(Node{Connective::False, {}, {}, {}, {}}));
  return f;
}

Formula Formula::negation(Formula f) {
  return Formula(std::make_shared<const Node>(Node{Connective::Not, {}, {}, std::move(f), {}}));
}

Formula Formula::binary(Connective c, Formula l, Formula r) {
  if (c != Connective::And && c != Connective::Or && c != Connective::Imp) {
    throw std::invalid_argument("not a binary connective");
  }
  return Formula(std::make_shared<const Node>(Node{c, {}, {}, std::move(l), std::move(r)}));
}

Formula Formula::conj(Formula l, Formula r) { return binary(Connective::And, std::move(l), std::move(r)); }
Formula Formula::disj(Formula l, Formula r) { return binary(Connective::Or, std::move(l), std::move(r)); }
Formula Formula::imp(Formula l, Formula r) { return binary(Connective::Imp, std::move(l), std::move(r)); }

Formula Formula::quantifier(Connective q, std::string bound, Formula body) {
  if (q != Connective::Forall && q != Connective::Exists) throw std::invalid_argument("not a quantifier");
  require_identifier(bound);
  return Formula(std::make_shared<const Node>(Node{q, std::move(bound), {}, std::move(body), {}}));
}

Formula Formula::forall(std::string bound, Formula body) {
  return quantifier(Connective::Forall, std::move(bound), std::move(body));
}

Formula Formula::exists(std::string bound, Formula body) {
  return quantifier(Connective::Exists, std::move(bound), std::move(body));
}

Connective Formula::kind() const { return node_->kind; }

bool Formula::is_binary() const {
  auto k = kind();
  return k == Connective::And || k == Connective::Or || k == Connective::Imp;
}

bool Formula::is_quantifier() const {
  return kind() == Connective::Forall || kind() == Connective::Exists;
}

const std::string& Formula::pred() const { return node_->name; }
std::span<const Term> Formula::args() const { return node_->args; }
const Formula& Formula::operand() const { return *node_->left; }
const Formula& Formula::lhs() const { return *node_->left; }
const Formula& Formula::rhs() const { return *node_->right; }
const std::string& Formula::bound() const { return node_->name; }
const Formula& Formula::body() const { return *node_->left; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.name == y.name && x.args == y.args && x.left == y.left &&
         x.right == y.right;
}

// ---------------------------------------------------------------------------
// Lexer / parser

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, std::string found)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "syntax error at offset " << offset << ": found " << found << ", expected one of {";
        for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
        os << "}";
        return os.str();
      }()),
      offset_(offset),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

namespace {

enum class Tok { Ident, FreeVar, LParen, RParen, Comma, Dot, Bang, Amp, Bar, Arrow, Turnstile, End, Invalid };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Invalid: return "invalid character '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, "", start};
    char c = src_[pos_];
    auto ident_at = [&](std::size_t p) {
      std::size_t q = p;
      if (q < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[q])) || src_[q] == '_')) {
        ++q;
        while (q < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[q])) || src_[q] == '_' ||
                                   src_[q] == '\'')) {
          ++q;
        }
      }
      return q;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      pos_ = ident_at(pos_);
      return {Tok::Ident, std::string(src_.substr(start, pos_ - start)), start};
    }
    if (c == '?') {
      std::size_t end = ident_at(pos_ + 1);
      if (end == pos_ + 1) {
        ++pos_;
        return {Tok::Invalid, "?", start};
      }
      pos_ = end;
      return {Tok::FreeVar, std::string(src_.substr(start + 1, end - start - 1)), start};
    }
    auto two = src_.substr(pos_, 2);
    if (two == "->") {
      pos_ += 2;
      return {Tok::Arrow, "->", start};
    }
    if (two == "|-") {
      pos_ += 2;
      return {Tok::Turnstile, "|-", start};
    }
    ++pos_;
    switch (c) {
      case '(': return {Tok::LParen, "(", start};
      case ')': return {Tok::RParen, ")", start};
      case ',': return {Tok::Comma, ",", start};
      case '.': return {Tok::Dot, ".", start};
      case '!': return {Tok::Bang, "!", start};
      case '&': return {Tok::Amp, "&", start};
      case '|': return {Tok::Bar, "|", start};
      default: return {Tok::Invalid, std::string(1, c), start};
    }
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

const std::vector<std::string> kFormulaStart = {"!", "(", "exists", "false", "forall", "identifier", "true"};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { advance(); }

  Formula formula() { return parse_imp(); }

  const Token& peek() const { return tok_; }

  void expect_end(std::vector<std::string> expected) {
    if (tok_.kind != Tok::End) fail(std::move(expected));
  }

  void advance() { tok_ = lexer_.next(); }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::sort(expected.begin(), expected.end());
    throw SyntaxError(tok_.offset, std::move(expected), describe(tok_));
  }

 private:
  bool keyword(std::string_view kw) const { return tok_.kind == Tok::Ident && tok_.text == kw; }

  Formula parse_imp() {
    Formula lhs = parse_disj();
    if (tok_.kind == Tok::Arrow) {
      advance();
      return Formula::imp(std::move(lhs), parse_imp());
    }
    return lhs;
  }

  Formula parse_disj() {
    Formula acc = parse_conj();
    while (tok_.kind == Tok::Bar) {
      advance();
      acc = Formula::disj(std::move(acc), parse_conj());
    }
    return acc;
  }

  Formula parse_conj() {
    Formula acc = parse_unary();
    while (tok_.kind == Tok::Amp) {
      advance();
      acc = Formula::conj(std::move(acc), parse_unary());
    }
    return acc;
  }

  Formula parse_unary() {
    if (tok_.kind == Tok::Bang) {
      advance();
      return Formula::negation(parse_unary());
    }
    if (keyword("forall") || keyword("exists")) {
      Connective q = tok_.text == "forall" ? Connective::Forall : Connective::Exists;
      advance();
      if (tok_.kind != Tok::Ident || is_keyword(tok_.text)) fail({"identifier"});
      std::string name = tok_.text;
      advance();
      if (tok_.kind != Tok::Dot) fail({"."});
      advance();
      bound_.push_back(name);
      // Quantifier scope covers '&' and '|' but stops at '->'.
      Formula body = parse_disj();
      bound_.pop_back();
      return Formula::quantifier(q, std::move(name), std::move(body));
    }
    if (keyword("true")) {
      advance();
      return Formula::truth();
    }
    if (keyword("false")) {
      advance();
      return Formula::falsity();
    }
    if (tok_.kind == Tok::LParen) {
      advance();
      Formula inner = parse_imp();
      if (tok_.kind != Tok::RParen) fail({")", "->"});
      advance();
      return inner;
    }
    if (tok_.kind == Tok::Ident) {
      std::string pred = tok_.text;
      advance();
      std::vector<Term> args;
      if (tok_.kind == Tok::LParen) {
        advance();
        args.push_back(parse_term());
        while (tok_.kind == Tok::Comma) {
          advance();
          args.push_back(parse_term());
        }
        if (tok_.kind != Tok::RParen) fail({")", ","});
        advance();
      }
      return Formula::atom(std::move(pred), std::move(args));
    }
    fail(kFormulaStart);
  }

  Term parse_term() {
    if (tok_.kind == Tok::FreeVar) {
      std::string name = tok_.text;
      if (is_keyword(name)) fail({"identifier"});
      advance();
      return Term::var(std::move(name));
    }
    if (tok_.kind == Tok::Ident && !is_keyword(tok_.text)) {
      std::string name = tok_.text;
      advance();
      bool bound = std::find(bound_.rbegin(), bound_.rend(), name) != bound_.rend();
      return bound ? Term::var(std::move(name)) : Term::constant(std::move(name));
    }
    fail({"?identifier", "identifier"});
  }

  Lexer lexer_;
  Token tok_{Tok::End, "", 0};
  std::vector<std::string> bound_;
};

// ---------------------------------------------------------------------------
// Printing

void collect_all_names(const Formula& f, std::set<std::string>& out) { collect_term_names(f, out); }

bool has_const_named(const Formula& f, const std::string& name) {
  std::set<std::string> consts;
  collect_constants(f, consts);
  return consts.count(name) > 0;
}

std::string prime_fresh(const std::string& base, const std::set<std::string>& avoid) {
  std::string candidate = base + "'";
  while (avoid.count(candidate)) candidate += "'";
  return candidate;
}

class Printer {
 public:
  std::string print(const Formula& f) {
    emit(f, 1, false);
    return std::move(out_);
  }

 private:
  // min_prec: lowest precedence printable without parentheses (1 imp, 2 or, 3 and, 4 unary).
  // tail_binds: an '&' or '|' follows, which an unparenthesised quantifier would capture.
  void emit(const Formula& f, int min_prec, bool tail_binds) {
    switch (f.kind()) {
      case Connective::Atom:
        out_ += f.pred();
        if (!f.args().empty()) {
          out_ += "(";
          for (std::size_t i = 0; i < f.args().size(); ++i) {
            if (i) out_ += ", ";
            term(f.args()[i]);
          }
          out_ += ")";
        }
        return;
      case Connective::True: out_ += "true"; return;
      case Connective::False: out_ += "false"; return;
      case Connective::Not:
        out_ += "!";
        emit(f.operand(), 4, tail_binds);
        return;
      case Connective::And:
      case Connective::Or:
      case Connective::Imp: {
        int prec = f.is(Connective::Imp) ? 1 : f.is(Connective::Or) ? 2 : 3;
        bool parens = min_prec > prec;
        if (parens) out_ += "(";
        bool tail = parens ? false : tail_binds;
        if (f.is(Connective::Imp)) {
          emit(f.lhs(), 2, false);
          out_ += " -> ";
          emit(f.rhs(), 1, tail);
        } else {
          emit(f.lhs(), prec, true);
          out_ += f.is(Connective::And) ? " & " : " | ";
          emit(f.rhs(), prec + 1, tail);
        }
        if (parens) out_ += ")";
        return;
      }
      case Connective::Forall:
      case Connective::Exists: {
        if (tail_binds) out_ += "(";
        std::string name = f.bound();
        Formula body = f.body();
        if (has_const_named(body, name)) {
          std::set<std::string> avoid;
          collect_all_names(body, avoid);
          avoid.insert(bound_.begin(), bound_.end());
          std::string renamed = prime_fresh(name, avoid);
          body = substitute(body, name, Term::var(renamed));
          name = renamed;
        }
        out_ += f.is(Connective::Forall) ? "forall " : "exists ";
        out_ += name;
        out_ += ". ";
        bound_.push_back(name);
        emit(body, 2, false);
        bound_.pop_back();
        if (tail_binds) out_ += ")";
        return;
      }
    }
  }

  void term(const Term& t) {
    if (t.is_var() && std::find(bound_.begin(), bound_.end(), t.name()) == bound_.end()) out_ += "?";
    out_ += t.name();
  }

  std::string out_;
  std::vector<std::string> bound_;
};

// ---------------------------------------------------------------------------
// Alpha equivalence

using Env = std::vector<std::string>;

std::optional<std::size_t> lookup(const Env& env, const std::string& name) {
  for (std::size_t i = env.size(); i-- > 0;) {
    if (env[i] == name) return env.size() - 1 - i;
  }
  return std::nullopt;
}

bool term_alpha(const Term& a, const Env& ea, const Term& b, const Env& eb) {
  if (a.kind() != b.kind()) return false;
  if (!a.is_var()) return a.name() == b.name();
  auto ia = lookup(ea, a.name());
  auto ib = lookup(eb, b.name());
  if (ia.has_value() != ib.has_value()) return false;
  return ia ? *ia == *ib : a.name() == b.name();
}

bool alpha_rec(const Formula& a, Env& ea, const Formula& b, Env& eb) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Connective::Atom: {
      if (a.pred() != b.pred() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        if (!term_alpha(a.args()[i], ea, b.args()[i], eb)) return false;
      }
      return true;
    }
    case Connective::True:
    case Connective::False: return true;
    case Connective::Not: return alpha_rec(a.operand(), ea, b.operand(), eb);
    case Connective::And:
    case Connective::Or:
    case Connective::Imp:
      return alpha_rec(a.lhs(), ea, b.lhs(), eb) && alpha_rec(a.rhs(), ea, b.rhs(), eb);
    case Connective::Forall:
    case Connective::Exists: {
      ea.push_back(a.bound());
      eb.push_back(b.bound());
      bool eq = alpha_rec(a.body(), ea, b.body(), eb);
      ea.pop_back();
      eb.pop_back();
      return eq;
    }
  }
  return false;
}

void key_rec(const Formula& f, Env& env, std::string& out) {
  switch (f.kind()) {
    case Connective::Atom:
      out += f.pred();
      out += "(";
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        if (i) out += ",";
        const Term& t = f.args()[i];
        if (t.is_var()) {
          if (auto idx = lookup(env, t.name())) {
            out += "$" + std::to_string(*idx);
          } else {
            out += "?" + t.name();
          }
        } else {
          out += t.name();
        }
      }
      out += ")";
      return;
    case Connective::True: out += "T"; return;
    case Connective::False: out += "F"; return;
    case Connective::Not:
      out += "~[";
      key_rec(f.operand(), env, out);
      out += "]";
      return;
    case Connective::And:
    case Connective::Or:
    case Connective::Imp:
      out += f.is(Connective::And) ? "&[" : f.is(Connective::Or) ? "|[" : ">[";
      key_rec(f.lhs(), env, out);
      out += ";";
      key_rec(f.rhs(), env, out);
      out += "]";
      return;
    case Connective::Forall:
    case Connective::Exists:
      out += f.is(Connective::Forall) ? "A[" : "E[";
      env.push_back(f.bound());
      key_rec(f.body(), env, out);
      env.pop_back();
      out += "]";
      return;
  }
}

void free_vars_rec(const Formula& f, Env& env, std::set<std::string>& out) {
  switch (f.kind()) {
    case Connective::Atom:
      for (const Term& t : f.args()) {
        if (t.is_var() && !lookup(env, t.name())) out.insert(t.name());
      }
      return;
    case Connective::True:
    case Connective::False: return;
    case Connective::Not: free_vars_rec(f.operand(), env, out); return;
    case Connective::And:
    case Connective::Or:
    case Connective::Imp:
      free_vars_rec(f.lhs(), env, out);
      free_vars_rec(f.rhs(), env, out);
      return;
    case Connective::Forall:
    case Connective::Exists:
      env.push_back(f.bound());
      free_vars_rec(f.body(), env, out);
      env.pop_back();
      return;
  }
}

}  // namespace

Formula parse_formula(std::string_view text) {
  Parser p(text);
  Formula f = p.formula();
  p.expect_end({"&", "->", "|"});
  return f;
}

std::string pretty(const Formula& f) { return Printer{}.print(f); }

std::string pretty(const Term& t) { return t.is_var() ? "?" + t.name() : t.name(); }

Formula substitute(const Formula& f, const std::string& var, const Term& t) {
  switch (f.kind()) {
    case Connective::Atom: {
      std::vector<Term> args(f.args().begin(), f.args().end());
      bool changed = false;
      for (Term& a : args) {
        if (a.is_var() && a.name() == var) {
          a = t;
          changed = true;
        }
      }
      return changed ? Formula::atom(f.pred(), std::move(args)) : f;
    }
    case Connective::True:
    case Connective::False: return f;
    case Connective::Not: return Formula::negation(substitute(f.operand(), var, t));
    case Connective::And:
    case Connective::Or:
    case Connective::Imp:
      return Formula::binary(f.kind(), substitute(f.lhs(), var, t), substitute(f.rhs(), var, t));
    case Connective::Forall:
    case Connective::Exists: {
      if (f.bound() == var) return f;
      if (!free_vars(f.body()).count(var)) return f;
      if (t.is_var() && t.name() == f.bound()) {
        std::set<std::string> avoid;
        collect_term_names(f.body(), avoid);
        avoid.insert(var);
        avoid.insert(t.name());
        std::string renamed = prime_fresh(f.bound(), avoid);
        Formula body = substitute(f.body(), f.bound(), Term::var(renamed));
        return Formula::quantifier(f.kind(), renamed, substitute(body, var, t));
      }
      return Formula::quantifier(f.kind(), f.bound(), substitute(f.body(), var, t));
    }
  }
  return f;
}

bool alpha_equal(const Formula& a, const Formula& b) {
  Env ea, eb;
  return alpha_rec(a, ea, b, eb);
}

std::string canonical_key(const Formula& f) {
  Env env;
  std::string out;
  key_rec(f, env, out);
  return out;
}

std::set<std::string> free_vars(const Formula& f) {
  Env env;
  std::set<std::string> out;
  free_vars_rec(f, env, out);
  return out;
}

void collect_term_names(const Formula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case Connective::Atom:
      for (const Term& t : f.args()) out.insert(t.name());
      return;
    case Connective::True:
    case Connective::False: return;
    case Connective::Not: collect_term_names(f.operand(), out); return;
    case Connective::And:
    case Connective::Or:
    case Connective::Imp:
      collect_term_names(f.lhs(), out);
      collect_term_names(f.rhs(), out);
      return;
    case Connective::Forall:
    case Connective::Exists:
      out.insert(f.bound());
      collect_term_names(f.body(), out);
      return;
  }
}

void collect_constants(const Formula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case Connective::Atom:
      for (const Term& t : f.args()) {
        if (!t.is_var()) out.insert(t.name());
      }
      return;
    case Connective::True:
    case Connective::False: return;
    case Connective::Not: collect_constants(f.operand(), out); return;
    case Connective::And:
    case Connective::Or:
    case Connective::Imp:
      collect_constants(f.lhs(), out);
      collect_constants(f.rhs(), out);
      return;
    case Connective::Forall:
    case Connective::Exists: collect_constants(f.body(), out); return;
  }
}

// ---------------------------------------------------------------------------
// Goals

GoalId GoalId::parse(std::string_view text) {
  if (text.size() < 2 || text.front() != 'g') throw std::invalid_argument("bad goal id: " + std::string(text));
  GoalId id;
  auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), id.value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad goal id: " + std::string(text));
  }
  return id;
}

bool Goal::same_content(const Goal& other) const {
  if (hyps.size() != other.hyps.size()) return false;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (!alpha_equal(hyps[i], other.hyps[i])) return false;
  }
  return alpha_equal(concl, other.concl);
}

Goal parse_goal(std::string_view text) {
  Parser p(text);
  Goal g;
  if (p.peek().kind != Tok::Turnstile) {
    while (true) {
      g.hyps.push_back(p.formula());
      if (p.peek().kind == Tok::Comma) {
        p.advance();
        continue;
      }
      if (p.peek().kind == Tok::Turnstile) break;
      p.fail({"&", ",", "->", "|", "|-"});
    }
  }
  p.advance();
  g.concl = p.formula();
  p.expect_end({"&", "->", "|"});
  return g;
}

std::string pretty(const Goal& g) {
  std::string out;
  for (std::size_t i = 0; i < g.hyps.size(); ++i) {
    if (i) out += ", ";
    out += pretty(g.hyps[i]);
  }
  out += g.hyps.empty() ? "|- " : " |- ";
  out += pretty(g.concl);
  return out;
}

std::string canonical_key(const Goal& g) {
  std::string out;
  for (const Formula& h : g.hyps) {
    out += canonical_key(h);
    out += ",";
  }
  out += "|-";
  out += canonical_key(g.concl);
  return out;
}

std::set<std::string> constants_of(const Goal& g) {
  std::set<std::string> out;
  for (const Formula& h : g.hyps) collect_constants(h, out);
  collect_constants(g.concl, out);
  return out;
}

bool is_closed(const Goal& g) {
  for (const Formula& h : g.hyps) {
    if (!free_vars(h).empty()) return false;
  }
  return free_vars(g.concl).empty();
}

Term fresh_const(const Goal& goal, const std::string& hint) {
  std::set<std::string> used;
  for (const Formula& h : goal.hyps) collect_term_names(h, used);
  collect_term_names(goal.concl, used);
  if (!used.count(hint)) return Term::constant(hint);
  for (std::size_t i = 1;; ++i) {
    std::string candidate = hint + "_" + std::to_string(i);
    if (!used.count(candidate)) return Term::constant(candidate);
  }
}

}  // namespace psg
