#include <gtest/gtest.h>

#include "generators.hpp"
#include "psg/logic.hpp"

namespace psg {
namespace {

Formula atom(const std::string& p, std::vector<Term> args = {}) { return Formula::atom(p, std::move(args)); }
Term v(const std::string& n) { return Term::var(n); }
Term c(const std::string& n) { return Term::constant(n); }

// -- parse_formula ---------------------------------------------------------

TEST(ParseFormula, PrecedenceAndOverImplication) {
  EXPECT_EQ(parse_formula("p & q -> r"), Formula::imp(Formula::conj(atom("p"), atom("q")), atom("r")));
}

TEST(ParseFormula, Quantifier) {
  EXPECT_EQ(parse_formula("forall x. p(x)"), Formula::forall("x", atom("p", {v("x")})));
}

TEST(ParseFormula, SyntaxErrorReportsOffset) {
  try {
    parse_formula("p & | q");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_FALSE(e.expected().empty());
    EXPECT_EQ(e.found(), "'|'");
  }
}

TEST(ParseFormula, ImplicationIsRightAssociative) {
  EXPECT_EQ(parse_formula("p -> q -> r"), Formula::imp(atom("p"), Formula::imp(atom("q"), atom("r"))));
}

TEST(ParseFormula, ConjunctionAndDisjunctionAreLeftAssociative) {
  EXPECT_EQ(parse_formula("p & q & r"), Formula::conj(Formula::conj(atom("p"), atom("q")), atom("r")));
  EXPECT_EQ(parse_formula("p | q | r"), Formula::disj(Formula::disj(atom("p"), atom("q")), atom("r")));
}

TEST(ParseFormula, PrecedenceLadder) {
  EXPECT_EQ(parse_formula("!p & q | r -> s"),
            Formula::imp(Formula::disj(Formula::conj(Formula::negation(atom("p")), atom("q")), atom("r")), atom("s")));
}

TEST(ParseFormula, QuantifierBodyStopsAtImplication) {
  EXPECT_EQ(parse_formula("exists y. r(y) -> exists y. r(y)"),
            Formula::imp(Formula::exists("y", atom("r", {v("y")})), Formula::exists("y", atom("r", {v("y")}))));
  EXPECT_EQ(parse_formula("forall x. p(x) & q(x)"),
            Formula::forall("x", Formula::conj(atom("p", {v("x")}), atom("q", {v("x")}))));
}

TEST(ParseFormula, TermsResolveToVariablesOnlyUnderBinders) {
  Formula f = parse_formula("forall x. p(x, y, ?z)");
  auto args = f.body().args();
  ASSERT_EQ(args.size(), 3u);
  EXPECT_EQ(args[0], v("x"));
  EXPECT_EQ(args[1], c("y"));
  EXPECT_EQ(args[2], v("z"));
}

TEST(ParseFormula, RejectsMalformedInput) {
  for (const char* bad : {"", "p &", "(p", "p)", "forall . p", "forall x p", "p(", "p(a,)", "p q", "true(a)", "&",
                          "p -> ", "exists true. p", "p @ q"}) {
    EXPECT_THROW(parse_formula(bad), SyntaxError) << bad;
  }
}

TEST(ParseFormula, KeywordsAreNotPredicates) {
  EXPECT_EQ(parse_formula("true"), Formula::truth());
  EXPECT_EQ(parse_formula("false"), Formula::falsity());
  EXPECT_THROW(parse_formula("forall"), SyntaxError);
}

// -- pretty ----------------------------------------------------------------

TEST(Pretty, Examples) {
  EXPECT_EQ(pretty(Formula::conj(atom("p"), atom("q"))), "p & q");
  EXPECT_EQ(pretty(Formula::imp(Formula::conj(atom("p"), atom("q")), atom("r"))), "p & q -> r");
  EXPECT_EQ(pretty(Formula::forall("x", Formula::exists("y", atom("q", {v("x"), v("y")})))),
            "forall x. exists y. q(x, y)");
}

TEST(Pretty, MinimalParentheses) {
  EXPECT_EQ(pretty(parse_formula("(p -> q) -> r")), "(p -> q) -> r");
  EXPECT_EQ(pretty(parse_formula("p -> (q -> r)")), "p -> q -> r");
  EXPECT_EQ(pretty(parse_formula("(p | q) & r")), "(p | q) & r");
  EXPECT_EQ(pretty(parse_formula("p & (q & r)")), "p & (q & r)");
  EXPECT_EQ(pretty(parse_formula("!(p & q)")), "!(p & q)");
  EXPECT_EQ(pretty(parse_formula("(forall x. p(x)) & q")), "(forall x. p(x)) & q");
  // A quantifier body stops at an implication.
  EXPECT_EQ(pretty(parse_formula("(exists x. p(x)) -> q")), "exists x. p(x) -> q");
  EXPECT_EQ(pretty(parse_formula("exists x. (p(x) -> q)")), "exists x. (p(x) -> q)");
  EXPECT_EQ(pretty(parse_formula("p(?x)")), "p(?x)");
}

TEST(Pretty, RenamesBinderThatWouldCaptureAConstant) {
  // The constant x must stay free after printing and reparsing.
  Formula f = Formula::forall("x", atom("p", {v("x"), c("x")}));
  EXPECT_TRUE(alpha_equal(parse_formula(pretty(f)), f)) << pretty(f);
}

TEST(Pretty, RoundTripOnGeneratedFormulas) {
  testing::Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    Formula f = testing::random_formula(rng, 5);
    std::string text = pretty(f);
    Formula back = parse_formula(text);
    ASSERT_TRUE(alpha_equal(back, f)) << text;
    ASSERT_EQ(pretty(back), text);
  }
}

// -- substitute --------------------------------------------------------------

TEST(Substitute, Examples) {
  EXPECT_EQ(substitute(atom("p", {v("x")}), "x", c("c")), atom("p", {c("c")}));
  Formula bound = Formula::forall("x", atom("p", {v("x")}));
  EXPECT_EQ(substitute(bound, "x", c("c")), bound);
  Formula capture = Formula::forall("y", atom("p", {v("x"), v("y")}));
  EXPECT_EQ(substitute(capture, "x", v("y")), Formula::forall("y'", atom("p", {v("y"), v("y'")})));
}

TEST(Substitute, FreeVariablesStayWithinBound) {
  testing::Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    Formula f = testing::random_formula(rng, 4);
    Term t = i % 2 ? v("x") : c("k");
    Formula g = substitute(f, "u", t);
    auto before = free_vars(f);
    before.erase("u");
    if (t.is_var()) before.insert(t.name());
    for (const auto& x : free_vars(g)) ASSERT_TRUE(before.count(x)) << pretty(f) << " => " << pretty(g);
    if (!free_vars(f).count("u")) {
      ASSERT_TRUE(alpha_equal(f, g));
    }
  }
}

// -- alpha_equal -----------------------------------------------------------

TEST(AlphaEqual, Examples) {
  EXPECT_TRUE(alpha_equal(parse_formula("forall x. p(x)"), parse_formula("forall y. p(y)")));
  EXPECT_FALSE(alpha_equal(parse_formula("forall x. p(x)"), parse_formula("exists x. p(x)")));
  EXPECT_FALSE(alpha_equal(parse_formula("p & q"), parse_formula("q & p")));
}

TEST(AlphaEqual, DistinguishesBindingStructure) {
  EXPECT_FALSE(alpha_equal(parse_formula("forall x. forall y. p(x, y)"), parse_formula("forall x. forall y. p(y, x)")));
  EXPECT_TRUE(alpha_equal(parse_formula("forall x. forall y. p(x, y)"), parse_formula("forall a. forall b. p(a, b)")));
  EXPECT_FALSE(alpha_equal(parse_formula("forall x. p(x)"), parse_formula("forall x. p(a)")));
  EXPECT_FALSE(alpha_equal(parse_formula("p(?x)"), parse_formula("p(?y)")));
}

TEST(AlphaEqual, IsAnEquivalenceAndMatchesCanonicalKey) {
  testing::Rng rng(3);
  std::vector<Formula> pool;
  for (int i = 0; i < 300; ++i) {
    Formula f = testing::random_formula(rng, 3);
    pool.push_back(f);
    // Alpha-variant obtained by renaming every binder through the printer's choice.
    pool.push_back(parse_formula(pretty(f)));
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    ASSERT_TRUE(alpha_equal(pool[i], pool[i]));
    for (std::size_t j = i; j < std::min(pool.size(), i + 12); ++j) {
      bool ij = alpha_equal(pool[i], pool[j]);
      ASSERT_EQ(ij, alpha_equal(pool[j], pool[i]));
      ASSERT_EQ(ij, canonical_key(pool[i]) == canonical_key(pool[j]));
      for (std::size_t k = j; k < std::min(pool.size(), j + 4); ++k) {
        if (ij && alpha_equal(pool[j], pool[k])) {
          ASSERT_TRUE(alpha_equal(pool[i], pool[k]));
        }
      }
    }
  }
}

// -- goals and fresh constants ------------------------------------------------

TEST(Goals, ParseAndPrint) {
  Goal g = parse_goal("p, q & r |- p");
  ASSERT_EQ(g.hyps.size(), 2u);
  EXPECT_EQ(pretty(g), "p, q & r |- p");
  EXPECT_EQ(pretty(parse_goal("|- p")), "|- p");
  EXPECT_THROW(parse_goal("p"), SyntaxError);
  EXPECT_THROW(parse_goal("p |- "), SyntaxError);
  EXPECT_THROW(parse_goal("|- p &"), SyntaxError);
}

TEST(Goals, ContentEqualityIgnoresIds) {
  Goal a = parse_goal("forall x. p(x) |- q");
  Goal b = parse_goal("forall y. p(y) |- q");
  b.id = GoalId{42};
  EXPECT_TRUE(a.same_content(b));
  EXPECT_EQ(canonical_key(a), canonical_key(b));
  EXPECT_FALSE(a.same_content(parse_goal("|- q")));
}

TEST(Goals, IdsRoundTrip) {
  EXPECT_EQ(GoalId::parse("g17").value, 17u);
  EXPECT_EQ(GoalId{17}.str(), "g17");
  EXPECT_THROW(GoalId::parse("x1"), std::invalid_argument);
  EXPECT_THROW(GoalId::parse("g"), std::invalid_argument);
  EXPECT_THROW(GoalId::parse("g1x"), std::invalid_argument);
}

TEST(FreshConst, Examples) {
  EXPECT_EQ(fresh_const(parse_goal("|- p(c)"), "c"), c("c_1"));
  EXPECT_EQ(fresh_const(parse_goal("|- p"), "c"), c("c"));
  EXPECT_EQ(fresh_const(parse_goal("|- p(c) & q(c_1)"), "c"), c("c_2"));
}

TEST(FreshConst, AvoidsEveryNameInTheGoal) {
  EXPECT_EQ(fresh_const(parse_goal("forall c. p(c) |- q"), "c"), c("c_1"));
}

TEST(Identifiers, Grammar) {
  EXPECT_TRUE(is_identifier("x"));
  EXPECT_TRUE(is_identifier("_a1'"));
  EXPECT_FALSE(is_identifier("1a"));
  EXPECT_FALSE(is_identifier(""));
  EXPECT_FALSE(is_identifier("a-b"));
}

}  // namespace
}  // namespace psg
