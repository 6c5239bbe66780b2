#include "psg/goal_type.hpp"

#include <algorithm>
#include <cctype>

namespace psg {

namespace {

constexpr Connective kAllSymbols[] = {Connective::Atom, Connective::True, Connective::False,
                                      Connective::Not,  Connective::And,  Connective::Or,
                                      Connective::Imp,  Connective::Forall, Connective::Exists};

const char* const kVocabulary =
    "any, concl_is(sym), hyp_is(sym), concl_in_hyps, num_hyps(eq|le|ge, n), closed "
    "where sym is one of atom, true, false, not, and, or, imp, forall, exists";

class GtParser {
 public:
  explicit GtParser(std::string_view src) : src_(src) {}

  GoalType parse() {
    GoalType gt;
    skip_ws();
    if (pos_ == src_.size()) throw GoalTypeError(pos_, "empty goal type");
    while (true) {
      GoalTypeLiteral lit = literal();
      if (lit.negated || lit.atom.kind != GoalTypeKind::Any) gt.literals.push_back(lit);
      skip_ws();
      if (pos_ == src_.size()) break;
      expect(',');
    }
    return gt;
  }

 private:
  GoalTypeLiteral literal() {
    skip_ws();
    GoalTypeLiteral lit;
    if (pos_ < src_.size() && src_[pos_] == '!') {
      lit.negated = true;
      ++pos_;
      skip_ws();
    }
    std::size_t start = pos_;
    std::string name = word();
    if (name == "any") {
      lit.atom = GoalTypeAtom::any();
    } else if (name == "closed") {
      lit.atom = GoalTypeAtom::closed();
    } else if (name == "concl_in_hyps") {
      lit.atom = GoalTypeAtom::concl_in_hyps();
    } else if (name == "concl_is" || name == "hyp_is") {
      expect('(');
      std::size_t sym_at = (skip_ws(), pos_);
      std::string sym_name = word();
      auto sym = top_symbol_from_name(sym_name);
      if (!sym) {
        throw GoalTypeError(sym_at, "unknown symbol '" + sym_name +
                                        "'; expected one of atom, true, false, not, and, or, imp, forall, exists");
      }
      expect(')');
      lit.atom = name == "concl_is" ? GoalTypeAtom::concl_is(*sym) : GoalTypeAtom::hyp_is(*sym);
    } else if (name == "num_hyps") {
      expect('(');
      std::size_t cmp_at = (skip_ws(), pos_);
      std::string cmp = word();
      Comparison c;
      if (cmp == "eq") {
        c = Comparison::Eq;
      } else if (cmp == "le") {
        c = Comparison::Le;
      } else if (cmp == "ge") {
        c = Comparison::Ge;
      } else {
        throw GoalTypeError(cmp_at, "unknown comparison '" + cmp + "'; expected eq, le or ge");
      }
      expect(',');
      skip_ws();
      std::size_t num_at = pos_;
      std::size_t n = 0;
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        throw GoalTypeError(num_at, "expected a nonnegative integer");
      }
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        if (n > 1'000'000'000) throw GoalTypeError(num_at, "integer too large");
        n = n * 10 + static_cast<std::size_t>(src_[pos_] - '0');
        ++pos_;
      }
      expect(')');
      lit.atom = GoalTypeAtom::num_hyps(c, n);
    } else if (name.empty()) {
      throw GoalTypeError(start, "expected a goal-type predicate");
    } else {
      throw GoalTypeError(start, "unknown predicate '" + name + "'; vocabulary: " + kVocabulary);
    }
    return lit;
  }

  std::string word() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != c) {
      throw GoalTypeError(pos_, std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

bool compare(Comparison c, std::size_t lhs, std::size_t rhs) {
  switch (c) {
    case Comparison::Eq: return lhs == rhs;
    case Comparison::Le: return lhs <= rhs;
    case Comparison::Ge: return lhs >= rhs;
  }
  return false;
}

}  // namespace

std::optional<Connective> top_symbol_from_name(std::string_view name) {
  for (Connective c : kAllSymbols) {
    if (connective_name(c) == name) return c;
  }
  return std::nullopt;
}

GoalType parse_goaltype(std::string_view text) { return GtParser(text).parse(); }

std::string pretty(const GoalTypeAtom& atom) {
  switch (atom.kind) {
    case GoalTypeKind::Any: return "any";
    case GoalTypeKind::ConclIs: return "concl_is(" + std::string(connective_name(atom.sym)) + ")";
    case GoalTypeKind::HypIs: return "hyp_is(" + std::string(connective_name(atom.sym)) + ")";
    case GoalTypeKind::ConclInHyps: return "concl_in_hyps";
    case GoalTypeKind::NumHyps: {
      const char* cmp = atom.cmp == Comparison::Eq ? "eq" : atom.cmp == Comparison::Le ? "le" : "ge";
      return "num_hyps(" + std::string(cmp) + ", " + std::to_string(atom.n) + ")";
    }
    case GoalTypeKind::Closed: return "closed";
  }
  return "?";
}

std::string pretty(const GoalType& gt) {
  if (gt.literals.empty()) return "any";
  std::string out;
  for (std::size_t i = 0; i < gt.literals.size(); ++i) {
    if (i) out += ", ";
    if (gt.literals[i].negated) out += "!";
    out += pretty(gt.literals[i].atom);
  }
  return out;
}

bool eval_atom(const GoalTypeAtom& atom, const Goal& g) {
  switch (atom.kind) {
    case GoalTypeKind::Any: return true;
    case GoalTypeKind::ConclIs: return g.concl.kind() == atom.sym;
    case GoalTypeKind::HypIs:
      return std::any_of(g.hyps.begin(), g.hyps.end(), [&](const Formula& h) { return h.kind() == atom.sym; });
    case GoalTypeKind::ConclInHyps:
      return std::any_of(g.hyps.begin(), g.hyps.end(), [&](const Formula& h) { return alpha_equal(h, g.concl); });
    case GoalTypeKind::NumHyps: return compare(atom.cmp, g.hyps.size(), atom.n);
    case GoalTypeKind::Closed: return is_closed(g);
  }
  return false;
}

bool eval_goaltype(const GoalType& gt, const Goal& g) {
  return std::all_of(gt.literals.begin(), gt.literals.end(),
                     [&](const GoalTypeLiteral& lit) { return eval_atom(lit.atom, g) != lit.negated; });
}

bool looks_unsatisfiable(const GoalType& gt) {
  std::size_t bound = 1;
  for (const auto& lit : gt.literals) {
    if (lit.negated && lit.atom.kind == GoalTypeKind::Any) return true;
    for (const auto& other : gt.literals) {
      if (other.atom == lit.atom && other.negated != lit.negated) return true;
    }
    if (lit.atom.kind == GoalTypeKind::NumHyps) bound = std::max(bound, lit.atom.n + 2);
  }
  // Counts beyond every mentioned n behave like n_max + 1, so a finite scan decides it.
  for (std::size_t count = 0; count <= bound; ++count) {
    bool ok = std::all_of(gt.literals.begin(), gt.literals.end(), [&](const GoalTypeLiteral& lit) {
      if (lit.atom.kind != GoalTypeKind::NumHyps) return true;
      return compare(lit.atom.cmp, count, lit.atom.n) != lit.negated;
    });
    if (ok) return false;
  }
  return true;
}

}  // namespace psg
