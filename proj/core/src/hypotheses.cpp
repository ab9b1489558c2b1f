#include "chrg/hypotheses.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chrg/grammar.hpp"

namespace chrg {

std::vector<Rule> assumption_prelude() {
  static const char* src =
      "timeless_pair @ =+(P,A), =-(P,B) <=> true & A=B | true.\n"
      "timeless_reuse @ =*(P,A) \\ =-(P,B) <=> true & A=B | true.\n"
      "linear_pair @ +(P,A,Z1), -(P,B,Z2) <=> Z1 < Z2 & A=B | true.\n"
      "persistent_reuse @ *(P,A,Z1) \\ -(P,B,Z2) <=> Z1 < Z2 & A=B | true.\n";
  Grammar g = parse_grammar_source(src);
  std::vector<Rule> out;
  for (auto& c : g.clauses) {
    c.raw.retry_on_backtrack = true;
    out.push_back(std::move(c.raw));
  }
  return out;
}

void install_assumption_prelude(Program& p) {
  for (Rule& r : assumption_prelude()) p.add(std::move(r));
  p.require_ground(sym("+"), 3);
  p.require_ground(sym("*"), 3);
  p.require_ground(sym("=+"), 2);
  p.require_ground(sym("=*"), 2);
}

namespace {

Term head_pattern(SymId pred, std::size_t arity) {
  if (arity == 0) return Term::constant(pred);
  std::vector<Term> args;
  args.reserve(arity);
  for (std::size_t i = 0; i < arity; ++i)
    args.push_back(Term::var("X" + std::to_string(i + 1), next_var_serial()));
  return Term::compound(pred, std::move(args));
}

}  // namespace

std::vector<Rule> abducible_rules(SymId pred, std::size_t arity) {
  Rule r;
  r.name = "abducible_" + symbol_table::name(pred);
  Term h = head_pattern(pred, arity);
  r.kept = {h};
  r.removed = {h};
  r.body = Goal::mk_true();
  std::vector<Rule> out;
  out.push_back(std::move(r));
  return out;
}

std::vector<Rule> negation_rules(SymId pred, std::size_t arity) {
  Rule r;
  r.name = "negation_" + symbol_table::name(pred);
  Term h = head_pattern(pred, arity);
  r.removed = {Term::compound("not", {h}), h};
  r.body = Goal::mk_fail();
  std::vector<Rule> out;
  out.push_back(std::move(r));
  return out;
}

const std::map<std::string, std::string>& demo_grammars() {
  static const std::map<std::string, std::string> demos = {
      {"sentence",
       ":- start(sentence).\n"
       "\n"
       "[peter] --> np.\n"
       "[mary] --> np.\n"
       "[likes] --> verb.\n"
       "np, verb, np --> sentence.\n"},

      {"as",
       ":- start(as).\n"
       ":- dedup(on).\n"
       "\n"
       "[a] --> as.\n"
       "as, as --> as.\n"},

      {"ambiguity",
       ":- start(s).\n"
       ":- dedup(on).\n"
       "\n"
       "[a], ab --> s.\n"
       "b, a --> s.\n"
       "b, bb --> a.\n"
       "[a] --> a.\n"
       "a, s --> b.\n"
       "[b] --> b.\n"
       "a, b --> ab.\n"
       "b, b --> bb.\n"},

      {"expr",
       ":- start(exp).\n"
       ":- dedup(on).\n"
       "\n"
       "exp, [+], exp --> exp.\n"
       "exp, [*], exp --> exp.\n"
       "['('], exp, [')'] --> exp.\n"
       "[Int], {integer(Int)} --> exp.\n"},

      {"expr_lr",
       ":- start(exp).\n"
       ":- modeLR.\n"
       "\n"
       "[Int], {integer(Int)} <-> exp.\n"
       "exp, ['^'], exp /- [R], {R \\= '^'} <-> exp.\n"
       "exp, [*], exp /- ([*] ; [+] ; [')'] ; [eof]) <-> exp.\n"
       "exp, [+], exp /- ([+] ; [')'] ; [eof]) <-> exp.\n"
       "['('], exp, [')'] <-> exp.\n"},

      {"coordination",
       ":- start(sents).\n"
       ":- final(all_consumed).\n"
       "\n"
       "[mary] <-> proper_name(mary, fem).\n"
       "[peter] <-> proper_name(peter, masc).\n"
       "[martha] <-> proper_name(martha, fem).\n"
       "[likes] <-> verb(likes).\n"
       "[loves] <-> verb(loves).\n"
       "[hates] <-> verb(hates).\n"
       "[she] <-> pronoun(fem).\n"
       "[he] <-> pronoun(masc).\n"
       "[her] <-> pronoun(fem).\n"
       "[him] <-> pronoun(masc).\n"
       "\n"
       "proper_name(X, Gender) <-> *active_individual(X, Gender), np(X, Gender).\n"
       "pronoun(Gender) <-> -active_individual(X, Gender), np(X, Gender).\n"
       "\n"
       "np(Sub, _), verb(V) /- [and] <-> =-ref_object(Obj), sent(V-(Sub,Obj)).\n"
       "np(Sub, _), verb(V), np(Obj, _) <-> sent(V-(Sub,Obj)).\n"
       "\n"
       "sent(S1), [and], sent(V2-(Sub2,Obj2)) <->\n"
       "   {find_constraint(=-(ref_object,_), _) -> =+(ref_object,[Obj2]) ; true},\n"
       "   sent(S1+(V2-(Sub2,Obj2))).\n"
       "\n"
       "sent(S), ['.'] <-> sents(S).\n"
       "sents(S1), sents(S2) <-> sents(S1+S2).\n"},

      {"abduction",
       ":- start(sents).\n"
       ":- abducible(active_individual/2).\n"
       ":- abducible(fact/3).\n"
       ":- negation(fact/3).\n"
       "\n"
       "[mary] <-> proper_name(mary, fem).\n"
       "[martha] <-> proper_name(martha, fem).\n"
       "[peter] <-> proper_name(peter, masc).\n"
       "[tom] <-> proper_name(tom, masc).\n"
       "[likes] <-> verb(likes).\n"
       "[loves] <-> verb(loves).\n"
       "[hates] <-> verb(hates).\n"
       "[she] <-> pronoun(fem).\n"
       "[he] <-> pronoun(masc).\n"
       "[her] <-> pronoun(fem).\n"
       "[him] <-> pronoun(masc).\n"
       "\n"
       "proper_name(X, Gender) <-> {active_individual(X, Gender)}, np(X, Gender).\n"
       "pronoun(Gender) <->\n"
       "   {find_constraint(active_individual(X, _), _), active_individual(X, Gender)},\n"
       "   np(X, Gender).\n"
       "\n"
       "np(Sub, _), verb(V), np(Obj, _) <-> {fact(V, Sub, Obj)}, sent.\n"
       "\n"
       "fact(likes, X, Y), fact(hates, X, Y) <=> fail.\n"
       "fact(loves, X, Y), fact(hates, X, Y) <=> fail.\n"
       "fact(hates, X, X) <=> fail.\n"
       "active_individual(X, masc), active_individual(X, fem) <=> fail.\n"
       "\n"
       "sent, ['.'] <-> sents.\n"
       "sents, sents <-> sents.\n"}};
  return demos;
}

}  // namespace chrg
