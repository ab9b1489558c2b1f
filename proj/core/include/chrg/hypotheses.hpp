#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "chrg/rule.hpp"
#include "chrg/term.hpp"

namespace chrg {

// The four pairing rules for assumption operators, in order:
//   '=+'(P,A), '=-'(P,B) <=> true & A=B | true.
//   '=*'(P,A) \ '=-'(P,B) <=> true & A=B | true.
//   '+'(P,A,Z1), '-'(P,B,Z2) <=> Z1 < Z2 & A=B | true.
//   '*'(P,A,Z1) \ '-'(P,B,Z2) <=> Z1 < Z2 & A=B | true.
// All four retry remaining assertion candidates on backtracking.
std::vector<Rule> assumption_prelude();

// Adds the prelude rules to p and registers the assertion functors
// ('+'/3, '*'/3, '=+'/2, '=*'/2) as ground-required.
void install_assumption_prelude(Program& p);

// pred(X...) \ pred(X...) <=> true.
std::vector<Rule> abducible_rules(SymId pred, std::size_t arity);

// not(pred(X...)), pred(X...) <=> fail.
std::vector<Rule> negation_rules(SymId pred, std::size_t arity);

// Worked example grammars, keyed by name, as .chrg sources.
const std::map<std::string, std::string>& demo_grammars();

}  // namespace chrg
