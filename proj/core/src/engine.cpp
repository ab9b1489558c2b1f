#include "chrg/engine.hpp"

#include "chrg/errors.hpp"
#include "chrg/term_io.hpp"

namespace chrg {

namespace {

void undo_frame(Substitution& frame, std::vector<VarSerial>& flog, std::size_t mark) {
  while (flog.size() > mark) {
    frame.erase(flog.back());
    flog.pop_back();
  }
}

}  // namespace

void Engine::trace_line(const std::string& s) {
  if (trace_) *trace_ << s << '\n';
}

// Equality modulo global bindings; unbound variables compare by serial.
static bool eq_global(const Bindings& b, const Term& x0, const Term& y0) {
  Term x = b.walk(x0);
  Term y = b.walk(y0);
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case Term::Kind::Var:
      return x.var_serial() == y.var_serial();
    case Term::Kind::Const:
      return x.const_sym() == y.const_sym();
    case Term::Kind::Int:
      return x.int_value() == y.int_value();
    case Term::Kind::Compound: {
      if (x.functor() != y.functor() || x.arity() != y.arity()) return false;
      for (std::size_t i = 0; i < x.arity(); ++i)
        if (!eq_global(b, x.args()[i], y.args()[i])) return false;
      return true;
    }
  }
  return false;
}

// One-way head matching: rule-band pattern variables bind into the
// frame; store variables in the target stay frozen.
static bool match_into(const Bindings& b, const Term& pat, const Term& tgt0,
                       Substitution& frame, std::vector<VarSerial>& flog) {
  Term tgt = b.walk(tgt0);
  if (pat.is_var()) {
    if (const Term* bound = frame.lookup(pat.var_serial()))
      return eq_global(b, *bound, tgt);
    frame.bind(pat.var_serial(), tgt);
    flog.push_back(pat.var_serial());
    return true;
  }
  switch (tgt.kind()) {
    case Term::Kind::Var:
      return false;
    case Term::Kind::Const:
      return pat.is_const() && pat.const_sym() == tgt.const_sym();
    case Term::Kind::Int:
      return pat.is_int() && pat.int_value() == tgt.int_value();
    case Term::Kind::Compound:
      if (!pat.is_compound() || pat.functor() != tgt.functor() ||
          pat.arity() != tgt.arity())
        return false;
      for (std::size_t i = 0; i < pat.arity(); ++i)
        if (!match_into(b, pat.args()[i], tgt.args()[i], frame, flog)) return false;
      return true;
  }
  return false;
}

static bool match_head(const Bindings& b, const Term& pattern, const Constraint& c,
                       Substitution& frame, std::vector<VarSerial>& flog) {
  if (pattern.is_const()) return c.arity() == 0;
  for (std::size_t i = 0; i < pattern.arity(); ++i)
    if (!match_into(b, pattern.args()[i], c.args[i], frame, flog)) return false;
  return true;
}

// Walks a variable through both bands: frame for rule-local serials,
// global bindings otherwise.
static Term walk_both(const Bindings& b, const Substitution& frame, Term t) {
  while (t.is_var()) {
    const Term* bound = t.var_serial() < kGlobalVarBase ? frame.lookup(t.var_serial())
                                                        : b.lookup(t.var_serial());
    if (!bound) return t;
    t = *bound;
  }
  return t;
}

static Term resolve_both(const Bindings& b, const Substitution& frame, const Term& t0) {
  Term t = walk_both(b, frame, t0);
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(resolve_both(b, frame, a));
  return Term::compound(t.functor(), std::move(args));
}

static bool contains_serial(const Term& t, VarSerial v) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return t.var_serial() == v;
    case Term::Kind::Compound:
      for (const Term& a : t.args())
        if (contains_serial(a, v)) return true;
      return false;
    default:
      return false;
  }
}

bool Engine::unify_tell(const Term& a0, const Term& b0, Substitution& frame,
                        std::vector<VarSerial>& flog) {
  Term a = walk_both(bindings_, frame, a0);
  Term b = walk_both(bindings_, frame, b0);
  if (a.is_var() && b.is_var() && a.var_serial() == b.var_serial()) return true;
  auto bind_var = [&](const Term& v, const Term& t) {
    if (contains_serial(resolve_both(bindings_, frame, t), v.var_serial()))
      return false;  // occurs check
    if (v.var_serial() < kGlobalVarBase) {
      frame.bind(v.var_serial(), t);
      flog.push_back(v.var_serial());
    } else {
      bindings_.bind(v.var_serial(), t, trail_);
    }
    return true;
  };
  if (a.is_var()) return bind_var(a, b);
  if (b.is_var()) return bind_var(b, a);
  if (a.kind() != b.kind()) return false;
  if (a.is_const()) return a.const_sym() == b.const_sym();
  if (a.is_int()) return a.int_value() == b.int_value();
  if (a.functor() != b.functor() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!unify_tell(a.args()[i], b.args()[i], frame, flog)) return false;
  return true;
}

Term Engine::instantiate(const Term& t, const Substitution& frame,
                         std::unordered_map<VarSerial, Term>* fresh_memo) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      VarSerial s = t.var_serial();
      if (s >= kGlobalVarBase) return t;
      if (const Term* bound = frame.lookup(s))
        return instantiate(*bound, frame, fresh_memo);
      if (!fresh_memo)
        throw EngineError("unbound rule variable in guard: " + t.var_name());
      auto it = fresh_memo->find(s);
      if (it != fresh_memo->end()) return it->second;
      Term v = t.var_named() ? Term::var(t.var_name(), next_var_serial())
                             : Term::var(next_var_serial());
      fresh_memo->emplace(s, v);
      return v;
    }
    case Term::Kind::Compound: {
      std::vector<Term> args;
      args.reserve(t.arity());
      for (const Term& a : t.args()) args.push_back(instantiate(a, frame, fresh_memo));
      return Term::compound(t.functor(), std::move(args));
    }
    default:
      return t;
  }
}

GoalPtr Engine::instantiate_goal(const GoalPtr& g, const Substitution& frame,
                                 std::unordered_map<VarSerial, Term>& memo) {
  if (!g) return Goal::mk_true();
  switch (g->kind) {
    case Goal::Kind::True:
    case Goal::Kind::Fail:
      return g;
    case Goal::Kind::Emit:
      return Goal::emit(instantiate(g->callee, frame, &memo));
    case Goal::Kind::Builtin:
      return Goal::builtin(instantiate(g->callee, frame, &memo));
    case Goal::Kind::And:
      return Goal::conj(instantiate_goal(g->a, frame, memo),
                        instantiate_goal(g->b, frame, memo));
    case Goal::Kind::Or:
      return Goal::disj(instantiate_goal(g->a, frame, memo),
                        instantiate_goal(g->b, frame, memo));
    case Goal::Kind::IfThenElse:
      return Goal::ite(instantiate_goal(g->a, frame, memo),
                       instantiate_goal(g->b, frame, memo),
                       instantiate_goal(g->c, frame, memo));
  }
  return g;
}

ConstraintId Engine::insert_constraint(const Term& t) {
  SymId f;
  std::vector<Term> args;
  if (t.is_const()) {
    f = t.const_sym();
  } else if (t.is_compound()) {
    f = t.functor();
    args.assign(t.args().begin(), t.args().end());
  } else {
    throw EngineError("cannot insert non-constraint term: " + print_term(t));
  }
  if (prog_.ground_required(f, args.size())) {
    for (const Term& a : args) {
      if (!bindings_.resolve(a).ground())
        throw EngineError("assertion arguments must be ground: " + print_term(t));
    }
  }
  ConstraintId id = store_.insert(f, std::move(args), trail_, /*allow_vars=*/true);
  ++stats_.inserted;
  if (trace_)
    trace_line("insert " + std::to_string(id) + " " +
               print_term(bindings_.resolve(store_.get(id).as_term())));
  return id;
}

void Engine::kill_constraint(ConstraintId id) {
  store_.kill(id, trail_);
  ++stats_.killed;
  if (trace_) trace_line("kill " + std::to_string(id));
}

bool Engine::eval_builtin(const Term& t, bool ask_mode) {
  Trail::Mark mark = trail_.mark();
  Substitution scratch;
  std::vector<VarSerial> slog;

  auto result = [&](bool ok) {
    if (!ok || (ask_mode && trail_.size() != mark)) {
      trail_.undo_to(mark, store_, history_, bindings_);
      return false;
    }
    return true;
  };

  SymId f = t.is_compound() ? t.functor() : t.const_sym();
  std::size_t n = t.is_compound() ? t.arity() : 0;
  const std::string& name = symbol_table::name(f);

  if (n == 0) {
    if (name == "true") return true;
    if (name == "fail") return false;
    if (name == "all_consumed") {
      for (ConstraintId id : store_.candidates(sym("+"), 3))
        if (store_.alive(id)) return false;
      for (ConstraintId id : store_.candidates(sym("=+"), 2))
        if (store_.alive(id)) return false;
      return true;
    }
  }
  if (n == 1 && name == "integer") {
    return bindings_.walk(t.args()[0]).is_int();
  }
  if (n == 2) {
    const Term& a = t.args()[0];
    const Term& b = t.args()[1];
    if (name == "=") {
      return result(unify_tell(a, b, scratch, slog));
    }
    if (name == "\\=") {
      bool unifies = unify_tell(a, b, scratch, slog);
      trail_.undo_to(mark, store_, history_, bindings_);
      undo_frame(scratch, slog, 0);
      return !unifies;
    }
    if (name == "<") {
      Term x = bindings_.walk(a);
      Term y = bindings_.walk(b);
      if (!x.is_int() || !y.is_int())
        throw EngineError("order comparison needs integers: " + print_term(t));
      return x.int_value() < y.int_value();
    }
    if (name == "member") {
      Term cell = bindings_.walk(b);
      while (cell.is_compound() && cell.arity() == 2 && cell.functor() == sym(".")) {
        Trail::Mark m2 = trail_.mark();
        std::size_t lmark = slog.size();
        if (unify_tell(a, cell.args()[0], scratch, slog)) return result(true);
        trail_.undo_to(m2, store_, history_, bindings_);
        undo_frame(scratch, slog, lmark);
        cell = bindings_.walk(cell.args()[1]);
      }
      return result(false);
    }
    if (name == "find_constraint") {
      Term pat = bindings_.walk(a);
      SymId pf;
      std::size_t pn;
      if (pat.is_const()) {
        pf = pat.const_sym();
        pn = 0;
      } else if (pat.is_compound()) {
        pf = pat.functor();
        pn = pat.arity();
      } else {
        throw EngineError("find_constraint needs a constraint pattern");
      }
      for (ConstraintId id : store_.candidates(pf, pn)) {
        if (!store_.alive(id)) continue;
        Trail::Mark m2 = trail_.mark();
        std::size_t lmark = slog.size();
        if (unify_tell(pat, store_.get(id).as_term(), scratch, slog) &&
            unify_tell(b, Term::integer(id), scratch, slog)) {
          return result(true);
        }
        trail_.undo_to(m2, store_, history_, bindings_);
        undo_frame(scratch, slog, lmark);
      }
      return result(false);
    }
  }
  throw EngineError("unknown builtin: " + print_term(t));
}

bool Engine::eval_cond(const GoalPtr& g) {
  switch (g->kind) {
    case Goal::Kind::True:
      return true;
    case Goal::Kind::Fail:
      return false;
    case Goal::Kind::Builtin:
      return eval_builtin(g->callee, /*ask_mode=*/false);
    case Goal::Kind::And:
      return eval_cond(g->a) && eval_cond(g->b);
    default:
      throw EngineError("invalid if-then-else condition");
  }
}

Engine::StepStatus Engine::step_goal(GoalPtr g) {
  switch (g->kind) {
    case Goal::Kind::True:
      return StepStatus::Ok;
    case Goal::Kind::Fail:
      return StepStatus::Failed;
    case Goal::Kind::And: {
      Frame fb;
      fb.goal = g->b;
      stack_.push_back(std::move(fb));
      Frame fa;
      fa.goal = g->a;
      stack_.push_back(std::move(fa));
      return StepStatus::Ok;
    }
    case Goal::Kind::Or: {
      ChoicePoint cp;
      cp.mark = trail_.mark();
      cp.stack = stack_;
      Frame fb;
      fb.goal = g->b;
      cp.stack.push_back(std::move(fb));
      cps_.push_back(std::move(cp));
      ++stats_.choice_points;
      trace_line("choice");
      Frame fa;
      fa.goal = g->a;
      stack_.push_back(std::move(fa));
      return StepStatus::Ok;
    }
    case Goal::Kind::IfThenElse: {
      Trail::Mark mark = trail_.mark();
      Frame f;
      if (eval_cond(g->a)) {
        f.goal = g->b;
      } else {
        trail_.undo_to(mark, store_, history_, bindings_);
        f.goal = g->c;
      }
      stack_.push_back(std::move(f));
      return StepStatus::Ok;
    }
    case Goal::Kind::Builtin: {
      const Term& c = g->callee;
      // In body position find_constraint backtracks over higher ids.
      if (c.is_compound() && c.arity() == 2 && c.functor() == sym("find_constraint"))
        return step_find(c.args()[0], c.args()[1], 0);
      if (c.is_compound() && c.arity() == 3 && c.functor() == sym("$find_from"))
        return step_find(c.args()[0], c.args()[1],
                         static_cast<std::size_t>(c.args()[2].int_value()));
      return eval_builtin(c, /*ask_mode=*/false) ? StepStatus::Ok
                                                 : StepStatus::Failed;
    }
    case Goal::Kind::Emit: {
      ConstraintId id = insert_constraint(bindings_.resolve(g->callee));
      Frame f;
      f.kind = Frame::Kind::Activate;
      f.active = id;
      stack_.push_back(std::move(f));
      return StepStatus::Ok;
    }
  }
  return StepStatus::Ok;
}

Engine::StepStatus Engine::step_find(const Term& pat0, const Term& idt,
                                     std::size_t start) {
  Term pat = bindings_.walk(pat0);
  SymId pf;
  std::size_t pn;
  if (pat.is_const()) {
    pf = pat.const_sym();
    pn = 0;
  } else if (pat.is_compound()) {
    pf = pat.functor();
    pn = pat.arity();
  } else {
    throw EngineError("find_constraint needs a constraint pattern");
  }
  const auto& cands = store_.candidates(pf, pn);
  Substitution scratch;
  std::vector<VarSerial> slog;
  for (std::size_t k = start; k < cands.size(); ++k) {
    ConstraintId id = cands[k];
    if (!store_.alive(id)) continue;
    Trail::Mark m = trail_.mark();
    if (unify_tell(pat, store_.get(id).as_term(), scratch, slog) &&
        unify_tell(idt, Term::integer(id), scratch, slog)) {
      ChoicePoint cp;
      cp.mark = m;
      cp.stack = stack_;
      Frame f;
      f.goal = Goal::builtin(Term::compound(
          "$find_from", {pat0, idt, Term::integer(static_cast<std::int64_t>(k + 1))}));
      cp.stack.push_back(std::move(f));
      cps_.push_back(std::move(cp));
      ++stats_.choice_points;
      trace_line("choice");
      return StepStatus::Ok;
    }
    trail_.undo_to(m, store_, history_, bindings_);
    undo_frame(scratch, slog, 0);
  }
  return StepStatus::Failed;
}

Engine::StepStatus Engine::step_activate() {
  Frame& fr = stack_.back();
  if (!store_.alive(fr.active)) {
    stack_.pop_back();
    return StepStatus::Ok;
  }
  const Constraint& c = store_.get(fr.active);
  const auto& occs = prog_.occurrences(c.functor, c.arity());
  std::size_t idx = fr.occ_idx;
  if (idx >= occs.size()) {
    stack_.pop_back();
    return StepStatus::Ok;
  }
  fr.occ_idx = idx + 1;
  ConstraintId active = fr.active;
  Frame tr;
  tr.kind = Frame::Kind::TryRule;
  tr.active = active;
  tr.occ = &occs[idx];
  stack_.push_back(std::move(tr));
  return StepStatus::Ok;
}

Engine::StepStatus Engine::step_try_rule() {
  const std::size_t top = stack_.size() - 1;
  const Occurrence& occ = *stack_[top].occ;
  const Rule& rule = prog_.rule(occ.rule);

  if (!store_.alive(stack_[top].active)) {
    stack_.pop_back();
    return StepStatus::Ok;
  }

  Substitution frame;
  std::vector<VarSerial> flog;
  if (!match_head(bindings_, rule.head(occ.active_pos), store_.get(stack_[top].active),
                  frame, flog)) {
    stack_.pop_back();
    return StepStatus::Ok;
  }

  if (stack_[top].levels.empty() && !occ.partners.empty()) {
    for (int pos : occ.partners) {
      PartnerLevel l;
      l.head_pos = pos;
      stack_[top].levels.push_back(l);
    }
  }
  std::vector<PartnerLevel>& levels = stack_[top].levels;
  std::vector<std::size_t> level_fmark(levels.size(), 0);

  // Re-validate partners chosen before a previous fire from this frame.
  std::size_t li = 0;
  for (; li < levels.size(); ++li) {
    PartnerLevel& l = levels[li];
    level_fmark[li] = flog.size();
    if (l.chosen == 0) break;
    bool ok = store_.alive(l.chosen);
    if (ok) {
      const Constraint& pc = store_.get(l.chosen);
      const Term& pat = rule.head(l.head_pos);
      SymId pf = pat.is_compound() ? pat.functor() : pat.const_sym();
      std::size_t pn = pat.is_compound() ? pat.arity() : 0;
      ok = pc.functor == pf && pc.arity() == pn &&
           match_head(bindings_, pat, pc, frame, flog);
    }
    if (!ok) {
      undo_frame(frame, flog, level_fmark[li]);
      for (std::size_t j = li; j < levels.size(); ++j) levels[j].chosen = 0;
      for (std::size_t j = li + 1; j < levels.size(); ++j) levels[j].cursor = 0;
      break;
    }
  }

  while (true) {
    if (li == levels.size()) {
      if (attempt_fire(rule, frame, flog)) return StepStatus::Ok;
      // Instance already in history or guard failed: advance the search.
      if (levels.empty()) {
        stack_.pop_back();
        return StepStatus::Ok;
      }
      li = levels.size() - 1;
      undo_frame(frame, flog, level_fmark[li]);
      levels[li].chosen = 0;
      continue;
    }
    PartnerLevel& l = levels[li];
    const Term& pat = rule.head(l.head_pos);
    SymId pf = pat.is_compound() ? pat.functor() : pat.const_sym();
    std::size_t pn = pat.is_compound() ? pat.arity() : 0;
    // The cursor walks one fixed list per scan: an argument-index bucket
    // when some pattern argument is already an integer, else the full
    // candidate list. The choice is made only at cursor 0 so resumed scans
    // keep their positions.
    const std::vector<ConstraintId>* bucket = nullptr;
    if (l.use_index && l.cursor != 0) {
      bucket = store_.indexed_candidates(pf, pn, l.idx_pos, l.idx_val);
      if (!bucket) {
        l.cursor = 0;
        l.use_index = false;
      }
    }
    if (l.cursor == 0) {
      l.use_index = false;
      bucket = nullptr;
      for (std::size_t k = 0; k < pn; ++k) {
        Term a = frame.walk(pat.args()[k]);
        if (a.is_var()) a = bindings_.walk(a);
        if (!a.is_int()) continue;
        const auto* b = store_.indexed_candidates(pf, pn, k, a.int_value());
        if (b) {
          l.use_index = true;
          l.idx_pos = static_cast<std::uint32_t>(k);
          l.idx_val = a.int_value();
          bucket = b;
          break;
        }
      }
    }
    const auto& cands = bucket ? *bucket : store_.candidates(pf, pn);

    bool found = false;
    while (l.cursor < cands.size()) {
      ConstraintId cid = cands[l.cursor++];
      if (!store_.alive(cid) || cid == stack_[top].active) continue;
      bool dup = false;
      for (std::size_t j = 0; j < li; ++j)
        if (levels[j].chosen == cid) dup = true;
      if (dup) continue;
      ++stats_.attempts;
      level_fmark[li] = flog.size();
      if (match_head(bindings_, pat, store_.get(cid), frame, flog)) {
        l.chosen = cid;
        found = true;
        break;
      }
      undo_frame(frame, flog, level_fmark[li]);
    }
    if (found) {
      ++li;
      continue;
    }
    l.cursor = 0;
    l.chosen = 0;
    if (li == 0) {
      stack_.pop_back();
      return StepStatus::Ok;
    }
    --li;
    undo_frame(frame, flog, level_fmark[li]);
    levels[li].chosen = 0;
  }
}

bool Engine::attempt_fire(const Rule& rule, Substitution& frame,
                          std::vector<VarSerial>& flog) {
  const std::size_t top = stack_.size() - 1;
  const Occurrence& occ = *stack_[top].occ;
  const std::size_t guard_fmark = flog.size();
  const Trail::Mark amark = trail_.mark();

  auto fail_attempt = [&] {
    trail_.undo_to(amark, store_, history_, bindings_);
    undo_frame(frame, flog, guard_fmark);
    return false;
  };

  for (const Term& g : rule.guard_ask) {
    Term gi = instantiate(g, frame, nullptr);
    if (!eval_builtin(gi, /*ask_mode=*/true)) return fail_attempt();
  }
  for (const auto& [a, b] : rule.guard_tell) {
    if (!unify_tell(a, b, frame, flog)) return fail_attempt();
  }

  const std::size_t heads = rule.head_count();
  if (heads > 8) throw EngineError("rule has too many heads: " + rule.name);
  std::array<ConstraintId, 8> ids{};
  ids[occ.active_pos] = stack_[top].active;
  for (const PartnerLevel& l : stack_[top].levels) ids[l.head_pos] = l.chosen;

  if (rule.is_propagation()) {
    HistKey key;
    key.rule = occ.rule;
    key.n = static_cast<std::uint8_t>(heads);
    key.ids = ids;
    if (history_.seen(key)) return fail_attempt();
    history_.record(key, trail_);
  }

  ++stats_.fired;
  ++stats_.fired_by_rule[occ.rule];
  if (trace_) {
    std::string line = "fire " + rule.name + " ids=(";
    for (std::size_t p = 0; p < heads; ++p) {
      if (p) line += ",";
      line += std::to_string(ids[p]);
    }
    line += ")";
    trace_line(line);
  }

  if (rule.retry_on_backtrack) {
    ChoicePoint cp;
    cp.mark = amark;
    cp.stack = stack_;
    if (stack_[top].levels.empty()) {
      cp.stack.pop_back();
    } else {
      cp.stack.back().levels.back().chosen = 0;
    }
    cps_.push_back(std::move(cp));
    ++stats_.choice_points;
    trace_line("choice");
  }

  for (std::size_t p = rule.kept.size(); p < heads; ++p) kill_constraint(ids[p]);

  std::unordered_map<VarSerial, Term> memo;
  GoalPtr body = instantiate_goal(rule.body, frame, memo);

  if (occ.active_removed) {
    stack_.pop_back();  // this TryRule frame
    if (stack_.empty() || stack_.back().kind != Frame::Kind::Activate)
      throw EngineError("activation stack corrupted");
    stack_.pop_back();  // the activation that spawned it
  } else if (rule.removed.empty()) {
    // Propagation keeps every head: continue from the next deepest candidate.
    if (!stack_[top].levels.empty()) stack_[top].levels.back().chosen = 0;
  } else {
    // Simpagation killed partners: restart the search, which also picks
    // up constraints the body is about to insert.
    for (PartnerLevel& l : stack_[top].levels) {
      l.cursor = 0;
      l.chosen = 0;
    }
  }

  Frame f;
  f.goal = std::move(body);
  stack_.push_back(std::move(f));
  return true;
}

bool Engine::backtrack() {
  if (cps_.empty()) return false;
  ChoicePoint cp = std::move(cps_.back());
  cps_.pop_back();
  trail_.undo_to(cp.mark, store_, history_, bindings_);
  stack_ = std::move(cp.stack);
  ++stats_.backtracks;
  trace_line("undo-to " + std::to_string(cp.mark));
  return true;
}

Engine::StepStatus Engine::step() {
  Frame& top = stack_.back();
  switch (top.kind) {
    case Frame::Kind::Goal: {
      GoalPtr g = top.goal;
      stack_.pop_back();
      return step_goal(g);
    }
    case Frame::Kind::Activate:
      return step_activate();
    case Frame::Kind::TryRule:
      return step_try_rule();
  }
  return StepStatus::Ok;
}

Engine::RunResult Engine::machine() {
  while (!stack_.empty()) {
    if (step() == StepStatus::Failed) {
      if (!backtrack()) {
        stack_.clear();
        return RunResult::Failure;
      }
    }
  }
  return RunResult::Success;
}

bool Engine::solve(GoalPtr goal) {
  Frame f;
  f.goal = goal ? std::move(goal) : Goal::mk_true();
  stack_.push_back(std::move(f));
  return machine() == RunResult::Success;
}

static GoalPtr build_run_goal(const std::vector<Term>& initial, GoalPtr final_goal) {
  GoalPtr g = final_goal ? std::move(final_goal) : Goal::mk_true();
  for (auto it = initial.rbegin(); it != initial.rend(); ++it)
    g = Goal::conj(Goal::emit(*it), g);
  return g;
}

bool Engine::run(const std::vector<Term>& initial, GoalPtr final_goal) {
  return solve(build_run_goal(initial, std::move(final_goal)));
}

std::size_t Engine::run_solutions(const std::vector<Term>& initial, GoalPtr final_goal,
                                  std::size_t limit,
                                  const std::function<void(const Engine&)>& on_solution) {
  if (limit == 0) return 0;
  Frame f;
  f.goal = build_run_goal(initial, std::move(final_goal));
  stack_.push_back(std::move(f));
  std::size_t n = 0;
  while (true) {
    if (machine() == RunResult::Failure) break;
    on_solution(*this);
    if (++n >= limit) break;
    if (!backtrack()) break;
  }
  return n;
}

}  // namespace chrg
