#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chrg/engine.hpp"
#include "chrg/grammar.hpp"
#include "chrg/term_io.hpp"

using namespace chrg;

namespace {

Program raw_program(const std::string& src) {
  Grammar g = parse_grammar_source(src);
  Program p;
  for (auto& c : g.clauses) {
    REQUIRE(c.kind == Grammar::Clause::Kind::Raw);
    p.add(std::move(c.raw));
  }
  return p;
}

std::vector<Term> terms(const std::vector<std::string>& srcs) {
  std::vector<Term> out;
  for (const auto& s : srcs) out.push_back(read_term(s));
  return out;
}

}  // namespace

TEST_CASE("simplification consumes its heads") {
  Program p = raw_program("a, b <=> c.");
  Engine eng(p);
  CHECK(eng.run(terms({"a", "b"})));
  CHECK(eng.dump_store() == "c\n");
  CHECK(eng.stats().fired == 1);
  CHECK(eng.stats().killed == 2);
}

TEST_CASE("propagation keeps heads and fires once per instance") {
  Program p = raw_program("a ==> b.");
  Engine eng(p);
  CHECK(eng.run(terms({"a", "a"})));
  CHECK(eng.dump_store() == "a\nb\na\nb\n");
  CHECK(eng.stats().fired == 2);
}

TEST_CASE("simpagation keeps the old copy and kills the new one") {
  Program p = raw_program("p(X) \\ p(X) <=> true.");
  Engine eng(p);
  CHECK(eng.run(terms({"p(1)", "p(1)", "p(2)"})));
  CHECK(eng.dump_store() == "p(1)\np(2)\n");
  CHECK(eng.store().alive(1));
  CHECK_FALSE(eng.store().alive(2));
}

TEST_CASE("ask guards test without binding") {
  Program p = raw_program("p(X) ==> X < 3 | small(X).");
  Engine eng(p);
  CHECK(eng.run(terms({"p(2)", "p(5)"})));
  CHECK(eng.dump_store() == "p(2)\nsmall(2)\np(5)\n");
}

TEST_CASE("member works as an ask guard") {
  Program p = raw_program("p(X) ==> member(X, [1,2]) | ok(X).");
  Engine eng(p);
  CHECK(eng.run(terms({"p(2)", "p(3)"})));
  CHECK(eng.dump_store() == "p(2)\nok(2)\np(3)\n");
}

TEST_CASE("tell guards bind store variables") {
  Program p = raw_program("p(X), q(Y) ==> true & X = Y | ok.");
  Term x = Term::var(next_var_serial());
  std::vector<Term> initial = {Term::compound("p", {x}), read_term("q(7)")};
  Engine eng(p);
  CHECK(eng.run(initial));
  CHECK(eng.dump_store() == "p(7)\nq(7)\nok\n");
  CHECK(eng.bindings().resolve(x) == Term::integer(7));
}

TEST_CASE("integer and comparison builtins") {
  Program p = raw_program(
      "p(X) ==> integer(X) | num(X).\n"
      "q(X, Y) ==> X \\= Y | diff.\n");
  Engine eng(p);
  CHECK(eng.run(terms({"p(4)", "p(a)", "q(1,2)", "q(1,1)"})));
  std::string dump = eng.dump_store();
  CHECK(dump.find("num(4)") != std::string::npos);
  CHECK(dump.find("num(a)") == std::string::npos);
  CHECK(dump.find("diff") != std::string::npos);
}

TEST_CASE("disjunctive bodies backtrack past failure") {
  Program p = raw_program(
      "go <=> p ; q.\n"
      "p <=> fail.\n");
  Engine eng(p);
  CHECK(eng.run(terms({"go"})));
  CHECK(eng.dump_store() == "q\n");
  CHECK(eng.stats().backtracks >= 1);
}

TEST_CASE("if-then-else refines on the store") {
  Program p = raw_program("go <=> find_constraint(p(X), _) -> got(X) ; none.");
  {
    Engine eng(p);
    CHECK(eng.run(terms({"p(5)", "go"})));
    CHECK(eng.dump_store() == "p(5)\ngot(5)\n");
  }
  {
    Engine eng(p);
    CHECK(eng.run(terms({"go"})));
    CHECK(eng.dump_store() == "none\n");
  }
}

TEST_CASE("find_constraint in body position backtracks over candidates") {
  Program p = raw_program(
      "pick <=> find_constraint(c(X), _), chose(X).\n"
      "chose(1) <=> fail.\n");
  Engine eng(p);
  CHECK(eng.run(terms({"c(1)", "c(2)", "pick"})));
  CHECK(eng.dump_store() == "c(1)\nc(2)\nchose(2)\n");
}

TEST_CASE("find_constraint binds the id argument") {
  Program p = raw_program("pick <=> find_constraint(c(X), I), at(X, I).");
  Engine eng(p);
  CHECK(eng.run(terms({"c(9)", "pick"})));
  CHECK(eng.dump_store() == "c(9)\nat(9,1)\n");
}

TEST_CASE("passive heads never trigger") {
  Program p = raw_program("a, b # passive ==> c.");
  {
    Engine eng(p);
    CHECK(eng.run(terms({"b", "a"})));
    CHECK(eng.dump_store() == "b\na\nc\n");
  }
  {
    Engine eng(p);
    CHECK(eng.run(terms({"a", "b"})));
    CHECK(eng.dump_store() == "a\nb\n");
  }
}

TEST_CASE("retry rules resume partner search on backtracking") {
  Grammar g = parse_grammar_source(
      "m(X) \\ e(Y) <=> picked(X, Y).\n"
      "picked(1, Y) <=> fail.\n");
  Program p;
  g.clauses[0].raw.retry_on_backtrack = true;
  for (auto& c : g.clauses) p.add(std::move(c.raw));
  Engine eng(p);
  CHECK(eng.run(terms({"m(1)", "m(2)", "e(7)"})));
  CHECK(eng.dump_store() == "m(1)\nm(2)\npicked(2,7)\n");
}

TEST_CASE("all_consumed checks linear assertions only") {
  Program p;
  GoalPtr final_goal = goal_from_term(read_term("all_consumed"));
  auto leftover_ok = [&](const char* t) {
    Engine eng(p);
    return eng.run(terms({t}), final_goal);
  };
  Engine empty(p);
  CHECK(empty.run({}, final_goal));
  CHECK_FALSE(leftover_ok("+(p,[a],1)"));
  CHECK_FALSE(leftover_ok("=+(p,[a])"));
  CHECK(leftover_ok("*(p,[a],1)"));
  CHECK(leftover_ok("=*(p,[a])"));
  CHECK(leftover_ok("-(p,[a],1)"));
  CHECK(leftover_ok("=-(p,[a])"));
}

TEST_CASE("ground-required functors reject unbound arguments") {
  Program p;
  p.require_ground(sym("+"), 3);
  Engine eng(p);
  Term x = Term::var(next_var_serial());
  std::vector<Term> initial = {
      Term::compound("+", {Term::constant("p"), x, Term::integer(1)})};
  CHECK_THROWS_AS(eng.run(initial), EngineError);
}

TEST_CASE("stats count fires, inserts, and kills") {
  Program p = raw_program("a ==> b.");
  Engine eng(p);
  CHECK(eng.run(terms({"a"})));
  CHECK(eng.stats().fired == 1);
  CHECK(eng.stats().inserted == 2);
  CHECK(eng.stats().killed == 0);
  CHECK(eng.stats().fired_by_rule.at(0) == 1);
}

TEST_CASE("run_solutions enumerates branches in order") {
  Program p = raw_program("go <=> p ; q.");
  std::vector<std::string> dumps;
  Engine eng(p);
  std::size_t n = eng.run_solutions(terms({"go"}), nullptr, 10,
                                    [&](const Engine& e) { dumps.push_back(e.dump_store()); });
  CHECK(n == 2);
  REQUIRE(dumps.size() == 2);
  CHECK(dumps[0] == "p\n");
  CHECK(dumps[1] == "q\n");

  Engine limited(p);
  CHECK(limited.run_solutions(terms({"go"}), nullptr, 1, [](const Engine&) {}) == 1);
}

TEST_CASE("failing final goal fails the run") {
  Program p;
  Engine eng(p);
  CHECK_FALSE(eng.run(terms({"a"}), goal_from_term(read_term("fail"))));
}

TEST_CASE("trace records inserts, fires, and kills") {
  Program p = raw_program("a <=> b.");
  Engine eng(p);
  std::ostringstream trace;
  eng.set_trace(&trace);
  CHECK(eng.run(terms({"a"})));
  std::string t = trace.str();
  CHECK(t.find("insert 1 a") != std::string::npos);
  CHECK(t.find("insert 2 b") != std::string::npos);
  CHECK(t.find("fire") != std::string::npos);
  CHECK(t.find("kill 1") != std::string::npos);
}

TEST_CASE("solve runs a goal to completion") {
  Program p = raw_program("p, q ==> r.");
  Engine eng(p);
  CHECK(eng.solve(goal_from_term(read_term("(p, q)"))));
  CHECK(eng.dump_store() == "p\nq\nr\n");
}

TEST_CASE("transitive closure with duplicate elimination terminates on cycles") {
  std::ifstream src_in(CHRG_SOURCE_DIR "/grammars/closure.chrg");
  REQUIRE(src_in.good());
  std::stringstream ss;
  ss << src_in.rdbuf();
  Program p = raw_program(ss.str());
  Engine eng(p);
  CHECK(eng.run(terms({"edge(a,b)", "edge(b,c)", "edge(c,a)"})));
  std::string dump = eng.dump_store();
  for (const char* fact :
       {"path(a,b)", "path(b,c)", "path(c,a)", "path(a,c)", "path(b,a)",
        "path(c,b)", "path(a,a)", "path(b,b)", "path(c,c)"})
    CHECK(dump.find(fact) != std::string::npos);
  CHECK(eng.store().live_count() == 12);
}

TEST_CASE("partial order rules propagate and collapse") {
  std::ifstream src_in(CHRG_SOURCE_DIR "/grammars/leq.chrg");
  REQUIRE(src_in.good());
  std::stringstream ss;
  ss << src_in.rdbuf();
  Program p = raw_program(ss.str());
  {
    Engine eng(p);
    CHECK(eng.run(terms({"leq(a,b)", "leq(b,c)"})));
    std::string dump = eng.dump_store();
    CHECK(dump.find("leq(a,c)") != std::string::npos);
    CHECK(eng.store().live_count() == 3);
  }
  {
    Engine eng(p);
    Term x = Term::var(next_var_serial());
    Term y = Term::var(next_var_serial());
    std::vector<Term> initial = {Term::compound("leq", {x, y}),
                                 Term::compound("leq", {y, x})};
    CHECK(eng.run(initial));
    CHECK(eng.bindings().resolve(x) == eng.bindings().resolve(y));
  }
}
