#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "chrg/errors.hpp"
#include "chrg/rule.hpp"
#include "chrg/term.hpp"

namespace chrg {

// One item of a grammar production.
struct GItem {
  enum class Kind {
    Terminals,    // [a,b,c] — each terminal consumes one token span
    NonTerminal,  // name or name(attrs...)
    Goal,         // {term} — guard on the recognized side, body goal on the produced side
    Assumption,   // +p(...), -p(...), *p(...), =+p(...), =-p(...), =*p(...)
  };
  Kind kind = Kind::NonTerminal;
  std::vector<Term> terminals;
  Term term;
  std::string op;  // Assumption operator
};

// lhs items are recognized (consumed by <->, kept by -->); the produced
// side emits assumptions/facts/goals and ends with the result nonterminal.
struct Production {
  std::vector<GItem> left_context;                 // -\ prefix
  std::vector<GItem> core;
  std::vector<std::vector<GItem>> right_context;   // /- (alt ; alt ; ...)
  std::vector<GItem> produced;
  bool simplification = false;                     // <-> vs -->
  bool lr_rule = false;                            // ruleLR prefix
  int line = 1;
};

struct Grammar {
  struct Clause {
    enum class Kind { Production, Raw };
    Kind kind = Kind::Production;
    Production prod;
    Rule raw;
  };
  std::vector<Clause> clauses;

  std::optional<SymId> start;     // :- start(name).
  bool global_lr = false;         // :- modeLR.
  std::optional<bool> dedup;      // :- dedup(on|off).
  std::vector<std::pair<SymId, std::size_t>> abducibles;  // :- abducible(p/n).
  std::vector<std::pair<SymId, std::size_t>> negations;   // :- negation(p/n).
  GoalPtr final_goal;             // :- final(Goal).

  std::size_t production_count() const {
    std::size_t n = 0;
    for (const auto& c : clauses)
      if (c.kind == Clause::Kind::Production) ++n;
    return n;
  }
};

struct CompileOptions {
  std::optional<bool> lr;      // force LR desugaring on/off
  bool lr_leftmost = false;    // passivate all but the leftmost head instead
  std::optional<bool> dedup;   // force duplicate elimination on/off
};

struct CompiledGrammar {
  Program program;
  bool has_start = false;  // raw-rule-only grammars may have no start symbol
  SymId start = 0;
  std::size_t start_arity = 2;               // attributes + two positions
  // (functor,arity) keys of grammar nonterminal constraints
  std::unordered_set<std::uint64_t> nonterminal_keys;
  GoalPtr final_goal;
  bool dedup = false;
  bool lr = false;
  bool wants_eof = false;  // grammar mentions the eof terminal
};

// token(t_i, i-1, i) for i = 1..k, plus token(eof, k, k+1) when add_eof.
std::vector<Term> tokenize(const std::vector<Term>& tokens, bool add_eof);

// Splits whitespace-separated tokens; digit runs become integer terms.
std::vector<Term> lex_tokens(std::string_view text);

CompiledGrammar compile_grammar(const Grammar& g, const CompileOptions& opt = {});

// Unit-production reachability closure; returns nonterminal names on a
// derives-itself cycle, in first-appearance order.
std::vector<SymId> loop_check(const Grammar& g);

Grammar parse_grammar_source(std::string_view text);

}  // namespace chrg
