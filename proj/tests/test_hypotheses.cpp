#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>
#include <vector>

#include "chrg/engine.hpp"
#include "chrg/grammar.hpp"
#include "chrg/hypotheses.hpp"
#include "chrg/term_io.hpp"

using namespace chrg;

namespace {

Term mk_list(std::vector<Term> xs) {
  Term t = Term::constant("[]");
  for (auto it = xs.rbegin(); it != xs.rend(); ++it)
    t = Term::compound(".", {*it, t});
  return t;
}

Term timed(const char* op, const char* pred, std::vector<Term> args, int at) {
  return Term::compound(
      op, {Term::constant(pred), mk_list(std::move(args)), Term::integer(at)});
}

Term timeless(const char* op, const char* pred, std::vector<Term> args) {
  return Term::compound(op, {Term::constant(pred), mk_list(std::move(args))});
}

GoalPtr all_consumed_goal() {
  return Goal::call(Term::constant("all_consumed"));
}

Program prelude_program() {
  Program p;
  install_assumption_prelude(p);
  return p;
}

std::vector<Term> live(const Engine& eng, const char* name, std::size_t arity) {
  std::vector<Term> out;
  const Store& st = eng.store();
  for (ConstraintId id = 1; id < st.next_id(); ++id) {
    if (!st.alive(id)) continue;
    const Constraint& c = st.get(id);
    if (c.functor == sym(name) && c.arity() == arity)
      out.push_back(eng.bindings().resolve(c.as_term()));
  }
  return out;
}

CompiledGrammar demo(const char* name) {
  return compile_grammar(parse_grammar_source(demo_grammars().at(name)));
}

}  // namespace

TEST_CASE("pairing rules ship with retry and an ask/tell split") {
  std::vector<Rule> rules = assumption_prelude();
  REQUIRE(rules.size() == 4);
  CHECK(rules[0].name == "timeless_pair");
  CHECK(rules[1].name == "timeless_reuse");
  CHECK(rules[2].name == "linear_pair");
  CHECK(rules[3].name == "persistent_reuse");
  for (const Rule& r : rules) {
    CHECK(r.retry_on_backtrack);
    REQUIRE(r.guard_tell.size() == 1);
  }
  CHECK(rules[0].kept.empty());
  CHECK(rules[0].removed.size() == 2);
  CHECK(rules[1].kept.size() == 1);
  CHECK(rules[1].removed.size() == 1);
  CHECK(rules[2].kept.empty());
  CHECK(rules[2].removed.size() == 2);
  CHECK(rules[3].kept.size() == 1);
  CHECK(rules[3].removed.size() == 1);
  bool lt = false;
  for (const Term& a : rules[2].guard_ask)
    if (a.is_compound() && symbol_table::name(a.functor()) == "<") lt = true;
  CHECK(lt);
}

TEST_CASE("linear assumption pairs with a later consumption and binds") {
  Program p = prelude_program();
  Engine eng(p);
  Term x = Term::var(next_var_serial());
  REQUIRE(eng.run({timed("+", "p", {Term::constant("a")}, 0),
                   timed("-", "p", {x}, 1)},
                  all_consumed_goal()));
  CHECK(eng.store().live_count() == 0);
  CHECK(eng.bindings().resolve(x) == Term::constant("a"));
}

TEST_CASE("timed pairing respects assertion order") {
  Program p = prelude_program();
  Engine eng(p);
  CHECK_FALSE(eng.run({timed("+", "p", {Term::constant("a")}, 2),
                       timed("-", "p", {Term::constant("a")}, 1)},
                      all_consumed_goal()));
  CHECK(eng.store().live_count() == 2);
}

TEST_CASE("linear assumptions are single use") {
  Program p = prelude_program();
  Engine eng(p);
  Term x = Term::var(next_var_serial());
  Term y = Term::var(next_var_serial());
  REQUIRE(eng.run({timed("+", "p", {Term::constant("a")}, 0),
                   timed("-", "p", {x}, 1), timed("-", "p", {y}, 2)},
                  all_consumed_goal()));
  std::vector<Term> minus = live(eng, "-", 3);
  REQUIRE(minus.size() == 1);
  CHECK(minus[0] == timed("-", "p", {y}, 2));
  CHECK(eng.bindings().resolve(x) == Term::constant("a"));
}

TEST_CASE("persistent assumptions serve many consumers") {
  Program p = prelude_program();
  Engine eng(p);
  Term x = Term::var(next_var_serial());
  Term y = Term::var(next_var_serial());
  REQUIRE(eng.run({timed("*", "p", {Term::constant("a")}, 0),
                   timed("-", "p", {x}, 1), timed("-", "p", {y}, 2)},
                  all_consumed_goal()));
  CHECK(eng.store().live_count() == 1);
  CHECK(live(eng, "*", 3).size() == 1);
  CHECK(eng.bindings().resolve(x) == Term::constant("a"));
  CHECK(eng.bindings().resolve(y) == Term::constant("a"));
}

TEST_CASE("timeless assumptions pair in any order") {
  Program p = prelude_program();
  Engine eng(p);
  Term x = Term::var(next_var_serial());
  REQUIRE(eng.run({timeless("=-", "p", {x}),
                   timeless("=+", "p", {Term::constant("a")})},
                  all_consumed_goal()));
  CHECK(eng.store().live_count() == 0);
  CHECK(eng.bindings().resolve(x) == Term::constant("a"));
}

TEST_CASE("timeless reuse keeps the assertion") {
  Program p = prelude_program();
  Engine eng(p);
  Term x = Term::var(next_var_serial());
  Term y = Term::var(next_var_serial());
  REQUIRE(eng.run({timeless("=*", "p", {Term::constant("a")}),
                   timeless("=-", "p", {x}), timeless("=-", "p", {y})},
                  all_consumed_goal()));
  CHECK(live(eng, "=*", 2).size() == 1);
  CHECK(eng.bindings().resolve(x) == Term::constant("a"));
  CHECK(eng.bindings().resolve(y) == Term::constant("a"));
}

TEST_CASE("assertion arguments must be ground") {
  Program p = prelude_program();
  Engine eng(p);
  CHECK_THROWS_AS(
      eng.run({timed("+", "p", {Term::var(next_var_serial())}, 0)}),
      EngineError);
}

TEST_CASE("consumption retries earlier assertions on backtracking") {
  Program p = prelude_program();
  Engine eng(p);
  REQUIRE(eng.run({timed("+", "p", {Term::constant("a")}, 0),
                   timed("+", "p", {Term::constant("b")}, 1)}));
  Term x = Term::var(next_var_serial());
  GoalPtr g = Goal::conj(
      Goal::emit(timed("-", "p", {x}, 2)),
      Goal::call(Term::compound("=", {x, Term::constant("b")})));
  REQUIRE(eng.solve(g));
  CHECK(eng.bindings().resolve(x) == Term::constant("b"));
  std::vector<Term> plus = live(eng, "+", 3);
  REQUIRE(plus.size() == 1);
  CHECK(plus[0] == timed("+", "p", {Term::constant("a")}, 0));
}

TEST_CASE("abducible and negation rule shapes") {
  std::vector<Rule> ab = abducible_rules(sym("q"), 2);
  REQUIRE(ab.size() == 1);
  CHECK(ab[0].name == "abducible_q");
  REQUIRE(ab[0].kept.size() == 1);
  REQUIRE(ab[0].removed.size() == 1);
  CHECK(ab[0].kept[0] == ab[0].removed[0]);
  CHECK(ab[0].body->kind == Goal::Kind::True);

  std::vector<Rule> ng = negation_rules(sym("q"), 2);
  REQUIRE(ng.size() == 1);
  CHECK(ng[0].name == "negation_q");
  CHECK(ng[0].kept.empty());
  REQUIRE(ng[0].removed.size() == 2);
  CHECK(symbol_table::name(ng[0].removed[0].functor()) == "not");
  CHECK(ng[0].removed[0].args()[0] == ng[0].removed[1]);
  CHECK(ng[0].body->kind == Goal::Kind::Fail);
}

TEST_CASE("abduced constraints are idempotent") {
  Program p;
  for (Rule& r : abducible_rules(sym("fact"), 2)) p.add(std::move(r));
  Engine eng(p);
  Term f = Term::compound("fact", {Term::constant("a"), Term::constant("b")});
  REQUIRE(eng.run({f, f}));
  CHECK(eng.store().live_count() == 1);
  CHECK(eng.store().alive(1));
  CHECK_FALSE(eng.store().alive(2));
}

TEST_CASE("negated facts reject matching assertions") {
  Program p;
  for (Rule& r : negation_rules(sym("fact"), 2)) p.add(std::move(r));
  Term nab = Term::compound(
      "not", {Term::compound("fact", {Term::constant("a"), Term::constant("b")})});
  {
    Engine eng(p);
    REQUIRE(eng.solve(Goal::emit(nab)));
    CHECK_FALSE(eng.solve(Goal::emit(
        Term::compound("fact", {Term::constant("a"), Term::constant("b")}))));
  }
  {
    Engine eng(p);
    REQUIRE(eng.solve(Goal::emit(nab)));
    REQUIRE(eng.solve(Goal::emit(
        Term::compound("fact", {Term::constant("a"), Term::constant("c")}))));
    CHECK(eng.store().live_count() == 2);
  }
}

TEST_CASE("discourse parses into a coordinated meaning term") {
  CompiledGrammar cg = demo("coordination");
  REQUIRE(cg.final_goal != nullptr);
  Engine eng(cg.program);
  REQUIRE(eng.run(tokenize(lex_tokens("mary likes peter ."), false),
                  cg.final_goal));
  std::vector<Term> sents = live(eng, "sents", 3);
  REQUIRE(sents.size() == 1);
  CHECK(print_term(sents[0]) == "sents(likes-(mary,peter),0,4)");

  Engine eng2(cg.program);
  REQUIRE(eng2.run(
      tokenize(lex_tokens("mary likes peter . she hates him ."), false),
      cg.final_goal));
  std::vector<Term> sents2 = live(eng2, "sents", 3);
  REQUIRE(sents2.size() == 1);
  CHECK(print_term(sents2[0]) ==
        "sents(likes-(mary,peter) + hates-(mary,peter),0,8)");
}

TEST_CASE("verb ellipsis borrows the later object") {
  CompiledGrammar cg = demo("coordination");
  Engine eng(cg.program);
  REQUIRE(eng.run(
      tokenize(
          lex_tokens("mary likes peter . she loves and martha hates him ."),
          false),
      cg.final_goal));
  std::vector<Term> sents = live(eng, "sents", 3);
  REQUIRE(sents.size() == 1);
  CHECK(print_term(sents[0]) ==
        "sents(likes-(mary,peter) + loves-(mary,peter) + "
        "hates-(martha,peter),0,11)");
}

TEST_CASE("lookahead arithmetic groups by precedence") {
  CompiledGrammar cg = demo("expr_lr");
  REQUIRE(cg.wants_eof);
  Engine eng(cg.program);
  REQUIRE(eng.run(tokenize(lex_tokens("2 + 3 * 4 + 5"), true)));
  CHECK(eng.stats().fired == 7);
  CHECK(eng.dump_store() == "token(eof,7,8)\nexp(0,7)\n");

  Engine eng2(cg.program);
  REQUIRE(eng2.run(tokenize(lex_tokens("2 ^ 3 ^ 4"), true)));
  CHECK(eng2.stats().fired == 5);
  CHECK(eng2.dump_store() == "token(eof,5,6)\nexp(0,5)\n");
}

TEST_CASE("pronoun resolution abduces a consistent fact set") {
  CompiledGrammar cg = demo("abduction");
  Engine eng(cg.program);
  std::vector<std::set<std::string>> sols;
  std::size_t n = eng.run_solutions(
      tokenize(lex_tokens("mary likes martha . she hates her ."), false),
      cg.final_goal, 8, [&](const Engine& e) {
        std::set<std::string> facts;
        for (const Term& t : live(e, "fact", 3)) facts.insert(print_term(t));
        sols.push_back(std::move(facts));
      });
  REQUIRE(n == 1);
  CHECK(sols[0] == std::set<std::string>{"fact(likes,mary,martha)",
                                         "fact(hates,martha,mary)"});
}

TEST_CASE("gender agreement can refute a discourse") {
  CompiledGrammar cg = demo("abduction");
  Engine eng(cg.program);
  CHECK_FALSE(eng.run(
      tokenize(lex_tokens("peter likes tom . she hates him ."), false)));
}
