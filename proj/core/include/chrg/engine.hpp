#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "chrg/rule.hpp"
#include "chrg/store.hpp"
#include "chrg/term.hpp"

namespace chrg {

struct EngineStats {
  std::uint64_t fired = 0;
  std::uint64_t inserted = 0;
  std::uint64_t killed = 0;
  std::uint64_t attempts = 0;       // candidate match attempts
  std::uint64_t choice_points = 0;
  std::uint64_t backtracks = 0;
  std::unordered_map<RuleId, std::uint64_t> fired_by_rule;
};

// Forward-chaining rule executor over a fixed Program.
//
// Activation is depth-first: a newly inserted constraint is activated
// immediately and runs to fixpoint before control returns to the rule
// body that emitted it. Disjunctive bodies and rules flagged
// retry_on_backtrack create chronological choice points; backtracking
// rewinds store, history, and bindings through the trail.
class Engine {
 public:
  explicit Engine(const Program& prog) : prog_(prog) {}

  // Executes the goal to completion. Returns true if a fixpoint was
  // reached on some branch, false if every branch failed.
  bool solve(GoalPtr goal);

  // Inserts and activates the initial constraints left to right (each
  // cascades fully before the next is inserted), then runs final_goal.
  bool run(const std::vector<Term>& initial, GoalPtr final_goal = nullptr);

  // Enumerates successful branches in backtracking order, invoking
  // on_solution at each fixpoint, up to limit. Returns the count.
  std::size_t run_solutions(const std::vector<Term>& initial, GoalPtr final_goal,
                            std::size_t limit,
                            const std::function<void(const Engine&)>& on_solution);

  const Store& store() const { return store_; }
  const Bindings& bindings() const { return bindings_; }
  const EngineStats& stats() const { return stats_; }
  const Program& program() const { return prog_; }

  std::string dump_store() const { return store_.dump(bindings_); }

  void set_trace(std::ostream* os) { trace_ = os; }

 private:
  struct PartnerLevel {
    int head_pos = 0;
    std::size_t cursor = 0;      // next candidate index to try
    ConstraintId chosen = 0;     // 0 = unfilled
    bool use_index = false;      // cursor walks an argument-index bucket
    std::uint32_t idx_pos = 0;
    std::int64_t idx_val = 0;
  };

  struct Frame {
    enum class Kind { Goal, Activate, TryRule };
    Kind kind = Kind::Goal;
    GoalPtr goal;                          // Goal
    ConstraintId active = 0;               // Activate, TryRule
    std::size_t occ_idx = 0;               // Activate: next occurrence
    const Occurrence* occ = nullptr;       // TryRule
    std::vector<PartnerLevel> levels;      // TryRule
  };

  struct ChoicePoint {
    Trail::Mark mark;
    std::vector<Frame> stack;
  };

  enum class StepStatus { Ok, Failed };
  enum class RunResult { Success, Failure };

  RunResult machine();
  StepStatus step();
  StepStatus step_goal(GoalPtr g);
  StepStatus step_activate();
  StepStatus step_try_rule();
  StepStatus step_find(const Term& pattern, const Term& id_term, std::size_t start);
  bool backtrack();

  // Fires the rule with the combination currently chosen in the top
  // TryRule frame. Returns false if the propagation history already
  // holds this instance (attempt undone, search should advance).
  bool attempt_fire(const Rule& rule, Substitution& frame,
                    std::vector<VarSerial>& flog);

  ConstraintId insert_constraint(const Term& t);
  void kill_constraint(ConstraintId id);

  // Builtin evaluation; binding builtins trail their effects. In ask
  // mode any net trail growth (a would-be binding) fails the call.
  bool eval_builtin(const Term& t, bool ask_mode);
  bool eval_cond(const GoalPtr& g);  // if-then-else condition, builtins only

  bool unify_tell(const Term& a, const Term& b, Substitution& frame,
                  std::vector<VarSerial>& flog);

  Term instantiate(const Term& t, const Substitution& frame,
                   std::unordered_map<VarSerial, Term>* fresh_memo);
  GoalPtr instantiate_goal(const GoalPtr& g, const Substitution& frame,
                           std::unordered_map<VarSerial, Term>& fresh_memo);

  void trace_line(const std::string& s);

  const Program& prog_;
  Store store_;
  PropagationHistory history_;
  Bindings bindings_;
  Trail trail_;
  EngineStats stats_;
  std::vector<Frame> stack_;
  std::vector<ChoicePoint> cps_;
  std::ostream* trace_ = nullptr;
};

}  // namespace chrg
