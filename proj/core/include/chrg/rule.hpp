#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chrg/store.hpp"
#include "chrg/term.hpp"

namespace chrg {

struct Goal;
using GoalPtr = std::shared_ptr<const Goal>;

// Rule body: constraint emissions, builtin calls, conjunction,
// disjunction (a backtracking choice), and if-then-else whose condition
// is restricted to builtins.
struct Goal {
  enum class Kind { True, Fail, Emit, Builtin, And, Or, IfThenElse };

  Kind kind = Kind::True;
  Term callee;       // Emit, Builtin
  GoalPtr a, b, c;   // And/Or: a,b; IfThenElse: a -> b ; c

  static GoalPtr mk_true();
  static GoalPtr mk_fail();
  static GoalPtr emit(Term t);
  static GoalPtr builtin(Term t);
  // Emit or Builtin or True/Fail depending on the callee's functor.
  static GoalPtr call(Term t);
  static GoalPtr conj(GoalPtr x, GoalPtr y);
  static GoalPtr disj(GoalPtr x, GoalPtr y);
  static GoalPtr ite(GoalPtr cond, GoalPtr then_g, GoalPtr else_g);
};

bool is_builtin(SymId functor, std::size_t arity);

// Term with ','/';'/'->' connectives into the corresponding goal tree.
GoalPtr goal_from_term(const Term& t);

std::string goal_to_string(const GoalPtr& g);

struct Rule {
  std::string name;
  std::vector<Term> kept;
  std::vector<Term> removed;
  // Indexed by textual head position: kept heads first, then removed.
  std::vector<bool> passive;
  std::vector<Term> guard_ask;                      // evaluated first
  std::vector<std::pair<Term, Term>> guard_tell;    // unifications, in order
  GoalPtr body;
  // Firing pushes a choice point that resumes partner search on backtracking.
  bool retry_on_backtrack = false;
  std::uint32_t var_count = 0;

  std::size_t head_count() const { return kept.size() + removed.size(); }
  bool is_removed_pos(std::size_t pos) const { return pos >= kept.size(); }
  const Term& head(std::size_t pos) const {
    return pos < kept.size() ? kept[pos] : removed[pos - kept.size()];
  }

  bool is_propagation() const { return removed.empty(); }

  // Renumbers variables to dense serials 0..var_count-1 and sizes the
  // passive vector. Must be called before adding the rule to a Program.
  void finalize();
};

// Variant of r with globally fresh variable serials.
Rule rename_apart(const Rule& r);

struct Occurrence {
  RuleId rule = 0;
  int active_pos = 0;          // textual head position of the active head
  bool active_removed = false;
  std::vector<int> partners;   // remaining head positions, textual order
};

class Program {
 public:
  RuleId add(Rule r);  // finalizes and indexes the rule
  const Rule& rule(RuleId id) const { return rules_[id]; }
  std::size_t size() const { return rules_.size(); }

  // Occurrences for an active constraint of this functor/arity, in
  // firing-priority order: rule order, removed heads before kept heads.
  const std::vector<Occurrence>& occurrences(SymId functor, std::size_t arity) const;

  // Constraints of this functor/arity must be ground when inserted;
  // violating emissions are engine errors (assumption assertions).
  void require_ground(SymId functor, std::size_t arity);
  bool ground_required(SymId functor, std::size_t arity) const;

  std::string dump() const;

 private:
  std::vector<Rule> rules_;
  std::unordered_map<std::uint64_t, std::vector<Occurrence>> occ_;
  std::unordered_set<std::uint64_t> ground_required_;
};

}  // namespace chrg
