#include "chrg/rule.hpp"

#include <functional>
#include <unordered_set>

#include "chrg/errors.hpp"
#include "chrg/term_io.hpp"

namespace chrg {

namespace {

GoalPtr make(Goal g) { return std::make_shared<const Goal>(std::move(g)); }

// True if the goal tree is acceptable as an if-then-else condition:
// builtins and conjunctions only, no emissions or nested control.
bool cond_ok(const GoalPtr& g) {
  if (!g) return false;
  switch (g->kind) {
    case Goal::Kind::True:
    case Goal::Kind::Fail:
    case Goal::Kind::Builtin:
      return true;
    case Goal::Kind::And:
      return cond_ok(g->a) && cond_ok(g->b);
    default:
      return false;
  }
}

}  // namespace

GoalPtr Goal::mk_true() {
  static GoalPtr t = make(Goal{});
  return t;
}

GoalPtr Goal::mk_fail() {
  static GoalPtr f = [] {
    Goal g;
    g.kind = Kind::Fail;
    return make(std::move(g));
  }();
  return f;
}

GoalPtr Goal::emit(Term t) {
  Goal g;
  g.kind = Kind::Emit;
  g.callee = std::move(t);
  return make(std::move(g));
}

GoalPtr Goal::builtin(Term t) {
  Goal g;
  g.kind = Kind::Builtin;
  g.callee = std::move(t);
  return make(std::move(g));
}

GoalPtr Goal::call(Term t) {
  if (t.is_const()) {
    if (t.const_sym() == sym("true")) return mk_true();
    if (t.const_sym() == sym("fail")) return mk_fail();
    return is_builtin(t.const_sym(), 0) ? builtin(std::move(t)) : emit(std::move(t));
  }
  if (t.is_compound() && is_builtin(t.functor(), t.arity()))
    return builtin(std::move(t));
  if (t.is_compound() || t.is_const()) return emit(std::move(t));
  throw EngineError("goal must be an atom or compound: " + print_term(t));
}

GoalPtr Goal::conj(GoalPtr x, GoalPtr y) {
  Goal g;
  g.kind = Kind::And;
  g.a = std::move(x);
  g.b = std::move(y);
  return make(std::move(g));
}

GoalPtr Goal::disj(GoalPtr x, GoalPtr y) {
  Goal g;
  g.kind = Kind::Or;
  g.a = std::move(x);
  g.b = std::move(y);
  return make(std::move(g));
}

GoalPtr Goal::ite(GoalPtr cond, GoalPtr then_g, GoalPtr else_g) {
  if (!cond_ok(cond))
    throw EngineError("if-then-else condition must be built-in goals only");
  Goal g;
  g.kind = Kind::IfThenElse;
  g.a = std::move(cond);
  g.b = std::move(then_g);
  g.c = std::move(else_g);
  return make(std::move(g));
}

bool is_builtin(SymId functor, std::size_t arity) {
  const std::string& n = symbol_table::name(functor);
  switch (arity) {
    case 0:
      return n == "true" || n == "fail" || n == "all_consumed";
    case 1:
      return n == "integer";
    case 2:
      return n == "=" || n == "\\=" || n == "<" || n == "member" ||
             n == "find_constraint";
    default:
      return false;
  }
}

GoalPtr goal_from_term(const Term& t) {
  if (t.is_compound() && t.arity() == 2) {
    SymId f = t.functor();
    if (f == sym(","))
      return Goal::conj(goal_from_term(t.args()[0]), goal_from_term(t.args()[1]));
    if (f == sym(";")) {
      const Term& l = t.args()[0];
      if (l.is_compound() && l.arity() == 2 && l.functor() == sym("->"))
        return Goal::ite(goal_from_term(l.args()[0]), goal_from_term(l.args()[1]),
                         goal_from_term(t.args()[1]));
      return Goal::disj(goal_from_term(t.args()[0]), goal_from_term(t.args()[1]));
    }
    if (f == sym("->"))
      return Goal::ite(goal_from_term(t.args()[0]), goal_from_term(t.args()[1]),
                       Goal::mk_fail());
  }
  return Goal::call(t);
}

std::string goal_to_string(const GoalPtr& g) {
  if (!g) return "true";
  switch (g->kind) {
    case Goal::Kind::True:
      return "true";
    case Goal::Kind::Fail:
      return "fail";
    case Goal::Kind::Emit:
    case Goal::Kind::Builtin:
      return print_term(g->callee);
    case Goal::Kind::And:
      return goal_to_string(g->a) + ", " + goal_to_string(g->b);
    case Goal::Kind::Or:
      return "(" + goal_to_string(g->a) + " ; " + goal_to_string(g->b) + ")";
    case Goal::Kind::IfThenElse:
      return "(" + goal_to_string(g->a) + " -> " + goal_to_string(g->b) + " ; " +
             goal_to_string(g->c) + ")";
  }
  return "true";
}

namespace {

using VarMap = std::unordered_map<VarSerial, Term>;

Term map_vars(const Term& t, VarMap& map, const std::function<Term(const Term&)>& fresh) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = map.find(t.var_serial());
      if (it != map.end()) return it->second;
      Term v = fresh(t);
      map.emplace(t.var_serial(), v);
      return v;
    }
    case Term::Kind::Compound: {
      std::vector<Term> args;
      args.reserve(t.arity());
      for (const Term& a : t.args()) args.push_back(map_vars(a, map, fresh));
      return Term::compound(t.functor(), std::move(args));
    }
    default:
      return t;
  }
}

GoalPtr map_goal(const GoalPtr& g, VarMap& map,
                 const std::function<Term(const Term&)>& fresh) {
  if (!g) return g;
  switch (g->kind) {
    case Goal::Kind::True:
    case Goal::Kind::Fail:
      return g;
    case Goal::Kind::Emit:
      return Goal::emit(map_vars(g->callee, map, fresh));
    case Goal::Kind::Builtin:
      return Goal::builtin(map_vars(g->callee, map, fresh));
    case Goal::Kind::And:
      return Goal::conj(map_goal(g->a, map, fresh), map_goal(g->b, map, fresh));
    case Goal::Kind::Or:
      return Goal::disj(map_goal(g->a, map, fresh), map_goal(g->b, map, fresh));
    case Goal::Kind::IfThenElse:
      return Goal::ite(map_goal(g->a, map, fresh), map_goal(g->b, map, fresh),
                       map_goal(g->c, map, fresh));
  }
  return g;
}

void map_rule(Rule& r, VarMap& map, const std::function<Term(const Term&)>& fresh) {
  for (Term& h : r.kept) h = map_vars(h, map, fresh);
  for (Term& h : r.removed) h = map_vars(h, map, fresh);
  for (Term& g : r.guard_ask) g = map_vars(g, map, fresh);
  for (auto& [a, b] : r.guard_tell) {
    a = map_vars(a, map, fresh);
    b = map_vars(b, map, fresh);
  }
  r.body = map_goal(r.body, map, fresh);
}

}  // namespace

void Rule::finalize() {
  if (!body) body = Goal::mk_true();
  if (passive.empty()) passive.assign(head_count(), false);
  if (passive.size() != head_count())
    throw EngineError("passive flags do not cover rule heads: " + name);
  VarMap map;
  VarSerial counter = 0;
  auto fresh = [&counter](const Term& v) {
    return v.var_named() ? Term::var(v.var_name(), counter++) : Term::var(counter++);
  };
  map_rule(*this, map, fresh);
  var_count = static_cast<std::uint32_t>(counter);
}

Rule rename_apart(const Rule& r) {
  Rule out = r;
  VarMap map;
  auto fresh = [](const Term& v) {
    return v.var_named() ? Term::var(v.var_name(), next_var_serial())
                         : Term::var(next_var_serial());
  };
  map_rule(out, map, fresh);
  return out;
}

RuleId Program::add(Rule r) {
  r.finalize();
  RuleId id = static_cast<RuleId>(rules_.size());
  rules_.push_back(std::move(r));
  const Rule& rule = rules_.back();

  // Active-head visit order within a rule: removed positions first, then
  // kept, each in textual order. A new constraint matching a removal rule
  // must be consumed before it can feed propagations.
  std::vector<int> order;
  for (std::size_t p = rule.kept.size(); p < rule.head_count(); ++p)
    order.push_back(static_cast<int>(p));
  for (std::size_t p = 0; p < rule.kept.size(); ++p)
    order.push_back(static_cast<int>(p));

  for (int pos : order) {
    if (rule.passive[pos]) continue;
    const Term& h = rule.head(pos);
    if (!h.is_compound() && !h.is_const())
      throw EngineError("rule head must be an atom or compound: " + rule.name);
    SymId f = h.is_compound() ? h.functor() : h.const_sym();
    std::size_t arity = h.is_compound() ? h.arity() : 0;
    Occurrence occ;
    occ.rule = id;
    occ.active_pos = pos;
    occ.active_removed = rule.is_removed_pos(pos);
    for (std::size_t p = 0; p < rule.head_count(); ++p)
      if (static_cast<int>(p) != pos) occ.partners.push_back(static_cast<int>(p));
    occ_[functor_key(f, arity)].push_back(std::move(occ));
  }
  return id;
}

const std::vector<Occurrence>& Program::occurrences(SymId functor,
                                                    std::size_t arity) const {
  static const std::vector<Occurrence> empty;
  auto it = occ_.find(functor_key(functor, arity));
  return it == occ_.end() ? empty : it->second;
}

void Program::require_ground(SymId functor, std::size_t arity) {
  ground_required_.insert(functor_key(functor, arity));
}

bool Program::ground_required(SymId functor, std::size_t arity) const {
  return ground_required_.count(functor_key(functor, arity)) != 0;
}

std::string Program::dump() const {
  std::string out;
  for (const Rule& r : rules_) {
    out += r.name;
    if (r.retry_on_backtrack) out += " #retry";
    out += " @ ";
    auto head_str = [&r](std::size_t pos) {
      std::string s = print_term(r.head(pos));
      if (r.passive[pos]) s += "#passive";
      return s;
    };
    for (std::size_t i = 0; i < r.kept.size(); ++i) {
      if (i) out += ", ";
      out += head_str(i);
    }
    if (r.removed.empty()) {
      out += " ==> ";
    } else {
      if (!r.kept.empty()) out += " \\ ";
      for (std::size_t i = 0; i < r.removed.size(); ++i) {
        if (i) out += ", ";
        out += head_str(r.kept.size() + i);
      }
      out += " <=> ";
    }
    std::string guard;
    for (const Term& g : r.guard_ask) {
      if (!guard.empty()) guard += " & ";
      guard += print_term(g);
    }
    for (const auto& [a, b] : r.guard_tell) {
      if (!guard.empty()) guard += " & ";
      guard += print_term(a) + " = " + print_term(b);
    }
    if (!guard.empty()) out += guard + " | ";
    out += goal_to_string(r.body);
    out += ".\n";
  }
  return out;
}

}  // namespace chrg
