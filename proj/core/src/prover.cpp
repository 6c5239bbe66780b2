#include "psg/prover.hpp"

namespace psg {

void TacticRegistry::register_tactic(const std::string& name, TacticFn fn) {
  if (!is_identifier(name)) throw std::invalid_argument("tactic name is not an identifier: '" + name + "'");
  if (!tactics_.emplace(name, std::move(fn)).second) throw DuplicateTacticError(name);
}

std::vector<std::string> TacticRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(tactics_.size());
  for (const auto& [name, fn] : tactics_) out.push_back(name);
  return out;
}

const TacticFn& TacticRegistry::lookup(const std::string& name) const {
  auto it = tactics_.find(name);
  if (it == tactics_.end()) throw UnknownTacticError(name);
  return it->second;
}

std::vector<std::string> list_tactics(const TacticRegistry& reg) { return reg.names(); }

std::vector<Alternative> apply_tactic(const TacticRegistry& reg, const std::string& name, const Goal& goal,
                                      GoalIdSource& ids) {
  auto raw = reg.lookup(name)(goal);
  std::vector<Alternative> alts;
  alts.reserve(raw.size());
  for (auto& subgoals : raw) {
    Alternative alt;
    for (Goal& g : subgoals) {
      g.id = ids.next();
      alt.subgoals.push_back(std::move(g));
    }
    alts.push_back(std::move(alt));
  }
  return alts;
}

namespace {

using Alts = std::vector<std::vector<Goal>>;

Goal sequent(std::vector<Formula> hyps, Formula concl) {
  Goal g;
  g.hyps = std::move(hyps);
  g.concl = std::move(concl);
  return g;
}

Alts conj_intro(const Goal& g) {
  if (!g.concl.is(Connective::And)) return {};
  return {{sequent(g.hyps, g.concl.lhs()), sequent(g.hyps, g.concl.rhs())}};
}

Alts strip_conj(const Goal& g) {
  if (g.concl.is(Connective::And)) return conj_intro(g);
  return {{sequent(g.hyps, g.concl)}};
}

Alts imp_intro(const Goal& g) {
  if (!g.concl.is(Connective::Imp)) return {};
  auto hyps = g.hyps;
  hyps.push_back(g.concl.lhs());
  return {{sequent(std::move(hyps), g.concl.rhs())}};
}

Alts all_intro(const Goal& g) {
  if (!g.concl.is(Connective::Forall)) return {};
  Term c = fresh_const(g, kFreshHint);
  return {{sequent(g.hyps, substitute(g.concl.body(), g.concl.bound(), c))}};
}

Alts exists_elim(const Goal& g) {
  Alts out;
  for (std::size_t i = 0; i < g.hyps.size(); ++i) {
    const Formula& h = g.hyps[i];
    if (!h.is(Connective::Exists)) continue;
    Term c = fresh_const(g, kFreshHint);
    auto hyps = g.hyps;
    hyps[i] = substitute(h.body(), h.bound(), c);
    out.push_back({sequent(std::move(hyps), g.concl)});
  }
  return out;
}

Alts exists_intro(const Goal& g) {
  if (!g.concl.is(Connective::Exists)) return {};
  Alts out;
  for (const std::string& name : constants_of(g)) {
    out.push_back({sequent(g.hyps, substitute(g.concl.body(), g.concl.bound(), Term::constant(name)))});
  }
  return out;
}

Alts conj_elim(const Goal& g) {
  Alts out;
  for (std::size_t i = 0; i < g.hyps.size(); ++i) {
    const Formula& h = g.hyps[i];
    if (!h.is(Connective::And)) continue;
    std::vector<Formula> hyps(g.hyps.begin(), g.hyps.begin() + static_cast<std::ptrdiff_t>(i));
    hyps.push_back(h.lhs());
    hyps.push_back(h.rhs());
    hyps.insert(hyps.end(), g.hyps.begin() + static_cast<std::ptrdiff_t>(i) + 1, g.hyps.end());
    out.push_back({sequent(std::move(hyps), g.concl)});
  }
  return out;
}

Alts disj_intro(const Goal& g) {
  if (!g.concl.is(Connective::Or)) return {};
  return {{sequent(g.hyps, g.concl.lhs())}, {sequent(g.hyps, g.concl.rhs())}};
}

Alts disj_elim(const Goal& g) {
  Alts out;
  for (std::size_t i = 0; i < g.hyps.size(); ++i) {
    const Formula& h = g.hyps[i];
    if (!h.is(Connective::Or)) continue;
    auto rest = g.hyps;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    auto left = rest;
    left.push_back(h.lhs());
    auto right = std::move(rest);
    right.push_back(h.rhs());
    out.push_back({sequent(std::move(left), g.concl), sequent(std::move(right), g.concl)});
  }
  return out;
}

Alts assumption(const Goal& g) {
  for (const Formula& h : g.hyps) {
    if (alpha_equal(h, g.concl)) return {{}};
  }
  return {};
}

Alts true_intro(const Goal& g) {
  if (!g.concl.is(Connective::True)) return {};
  return {{}};
}

Alts false_elim(const Goal& g) {
  for (const Formula& h : g.hyps) {
    if (h.is(Connective::False)) return {{}};
  }
  return {};
}

TacticRegistry make_builtin() {
  TacticRegistry reg;
  reg.register_tactic("conj_intro", conj_intro);
  reg.register_tactic("imp_intro", imp_intro);
  reg.register_tactic("all_intro", all_intro);
  reg.register_tactic("exists_elim", exists_elim);
  reg.register_tactic("exists_intro", exists_intro);
  reg.register_tactic("conj_elim", conj_elim);
  reg.register_tactic("disj_intro", disj_intro);
  reg.register_tactic("disj_elim", disj_elim);
  reg.register_tactic("assumption", assumption);
  reg.register_tactic("true_intro", true_intro);
  reg.register_tactic("false_elim", false_elim);
  reg.register_tactic("strip_conj", strip_conj);
  return reg;
}

}  // namespace

const TacticRegistry& builtin_registry() {
  static const TacticRegistry reg = make_builtin();
  return reg;
}

}  // namespace psg
