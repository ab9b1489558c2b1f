#include "chrg/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chrg/hypotheses.hpp"
#include "chrg/term_io.hpp"

namespace chrg {

std::vector<Term> tokenize(const std::vector<Term>& tokens, bool add_eof) {
  std::vector<Term> out;
  out.reserve(tokens.size() + (add_eof ? 1 : 0));
  for (std::size_t i = 0; i < tokens.size(); ++i)
    out.push_back(Term::compound(
        "token", {tokens[i], Term::integer(static_cast<std::int64_t>(i)),
                  Term::integer(static_cast<std::int64_t>(i + 1))}));
  if (add_eof)
    out.push_back(Term::compound(
        "token", {Term::constant("eof"),
                  Term::integer(static_cast<std::int64_t>(tokens.size())),
                  Term::integer(static_cast<std::int64_t>(tokens.size() + 1))}));
  return out;
}

std::vector<Term> lex_tokens(std::string_view text) {
  std::vector<Term> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])))
      ++j;
    std::string word(text.substr(i, j - i));
    bool digits = std::all_of(word.begin(), word.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c));
    });
    if (digits)
      out.push_back(Term::integer(std::stoll(word)));
    else
      out.push_back(Term::constant(word));
    i = j;
  }
  return out;
}

namespace {

struct Sig {
  SymId name = 0;
  std::size_t attrs = 0;
  bool operator==(const Sig& o) const { return name == o.name && attrs == o.attrs; }
};

Sig item_sig(const GItem& it) {
  if (it.term.is_compound()) return {it.term.functor(), it.term.arity()};
  return {it.term.const_sym(), 0};
}

// name(attrs..., lo, hi)
Term positioned(const GItem& it, const Term& lo, const Term& hi) {
  std::vector<Term> args;
  if (it.term.is_compound()) args = it.term.args();
  args.push_back(lo);
  args.push_back(hi);
  return Term::compound(it.term.head_sym(), std::move(args));
}

void flatten_conj(const Term& t, std::vector<Term>& out) {
  if (t.is_compound() && t.arity() == 2 && t.functor() == sym(",")) {
    flatten_conj(t.args()[0], out);
    flatten_conj(t.args()[1], out);
    return;
  }
  out.push_back(t);
}

bool mentions_const(const Term& t, SymId c) {
  switch (t.kind()) {
    case Term::Kind::Const:
      return t.const_sym() == c;
    case Term::Kind::Compound:
      for (const Term& a : t.args())
        if (mentions_const(a, c)) return true;
      return false;
    default:
      return false;
  }
}

bool goal_mentions(const GoalPtr& g, const std::unordered_set<std::uint64_t>& keys);

bool term_heads_in(const Term& t, const std::unordered_set<std::uint64_t>& keys) {
  if (t.is_const() && keys.count(functor_key(t.const_sym(), 0))) return true;
  if (t.is_compound()) {
    if (keys.count(functor_key(t.functor(), t.arity()))) return true;
    for (const Term& a : t.args())
      if (term_heads_in(a, keys)) return true;
  }
  return false;
}

bool goal_mentions(const GoalPtr& g, const std::unordered_set<std::uint64_t>& keys) {
  if (!g) return false;
  switch (g->kind) {
    case Goal::Kind::Emit:
    case Goal::Kind::Builtin:
      return term_heads_in(g->callee, keys);
    case Goal::Kind::And:
    case Goal::Kind::Or:
      return goal_mentions(g->a, keys) || goal_mentions(g->b, keys);
    case Goal::Kind::IfThenElse:
      return goal_mentions(g->a, keys) || goal_mentions(g->b, keys) ||
             goal_mentions(g->c, keys);
    default:
      return false;
  }
}

const std::unordered_set<std::uint64_t>& assumption_keys() {
  static const std::unordered_set<std::uint64_t> keys = {
      functor_key(sym("+"), 3),  functor_key(sym("-"), 3),
      functor_key(sym("*"), 3),  functor_key(sym("=+"), 2),
      functor_key(sym("=-"), 2), functor_key(sym("=*"), 2)};
  return keys;
}

bool uses_assumptions(const Grammar& g) {
  const auto& keys = assumption_keys();
  for (const auto& c : g.clauses) {
    if (c.kind == Grammar::Clause::Kind::Production) {
      const Production& p = c.prod;
      for (const auto& it : p.produced) {
        if (it.kind == GItem::Kind::Assumption) return true;
        if (term_heads_in(it.term, keys)) return true;
      }
      for (const auto& it : p.core)
        if (it.kind == GItem::Kind::Goal && term_heads_in(it.term, keys)) return true;
    } else {
      const Rule& r = c.raw;
      for (const Term& h : r.kept)
        if (term_heads_in(h, keys)) return true;
      for (const Term& h : r.removed)
        if (term_heads_in(h, keys)) return true;
      if (goal_mentions(r.body, keys)) return true;
    }
  }
  if (g.final_goal && goal_mentions(g.final_goal, keys)) return true;
  return false;
}

class ProductionCompiler {
 public:
  ProductionCompiler(const Production& p, bool lr, bool lr_leftmost)
      : p_(p), lr_(lr), leftmost_(lr_leftmost) {}

  Rule compile() {
    compile_core();
    compile_right_context();
    compile_left_context();
    assemble_heads();
    compile_produced();
    return std::move(rule_);
  }

 private:
  Term pos_var() {
    return Term::var("N" + std::to_string(npos_++), next_var_serial());
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at line " + std::to_string(p_.line), p_.line, 1);
  }

  void add_guard(const Term& goal, std::vector<Term>& asks) {
    std::vector<Term> units;
    flatten_conj(goal, units);
    for (const Term& u : units) {
      if (u.is_compound() && u.arity() == 2 &&
          (u.functor() == sym(";") || u.functor() == sym("->")))
        fail("control constructs are not allowed in a recognition guard");
      if (u.is_compound() && u.arity() == 2 && u.functor() == sym("="))
        tells_.emplace_back(u.args()[0], u.args()[1]);
      else
        asks.push_back(u);
    }
  }

  // Consumed items chain positions left to right; goals become guards.
  void compile_items(const std::vector<GItem>& items, Term from,
                     const Term* fixed_end, std::vector<Term>& heads,
                     std::vector<Term>& asks) {
    std::size_t remaining = 0;
    for (const auto& it : items) {
      if (it.kind == GItem::Kind::Terminals) remaining += it.terminals.size();
      if (it.kind == GItem::Kind::NonTerminal) ++remaining;
    }
    Term cur = from;
    auto next_pos = [&]() {
      --remaining;
      return (fixed_end && remaining == 0) ? *fixed_end : pos_var();
    };
    for (const auto& it : items) {
      switch (it.kind) {
        case GItem::Kind::Terminals:
          for (const Term& t : it.terminals) {
            Term nxt = next_pos();
            heads.push_back(Term::compound("token", {t, cur, nxt}));
            cur = nxt;
          }
          break;
        case GItem::Kind::NonTerminal: {
          Term nxt = next_pos();
          heads.push_back(positioned(it, cur, nxt));
          cur = nxt;
          break;
        }
        case GItem::Kind::Goal:
          add_guard(it.term, asks);
          break;
        case GItem::Kind::Assumption:
          fail("assumption operators belong on the produced side");
      }
    }
    end_ = cur;
  }

  void compile_core() {
    core_lo_ = pos_var();
    compile_items(p_.core, core_lo_, nullptr, core_heads_, core_asks_);
    core_hi_ = end_;
    if (core_heads_.empty())
      throw EmptyProductionError(
          "production consumes no grammar symbols at line " +
              std::to_string(p_.line),
          p_.line, 1);
  }

  void compile_right_context() {
    const auto& alts = p_.right_context;
    if (alts.empty()) return;
    if (alts.size() == 1) {
      // A goal-only right context contributes just the guard.
      compile_items(alts[0], core_hi_, nullptr, rc_heads_, rc_asks_);
      return;
    }
    std::vector<Term> options;
    for (const auto& alt : alts) {
      if (alt.size() != 1 || alt[0].kind != GItem::Kind::Terminals ||
          alt[0].terminals.size() != 1)
        fail("right-context alternatives must each be a single terminal");
      options.push_back(alt[0].terminals[0]);
    }
    Term r = Term::var("R", next_var_serial());
    rc_heads_.push_back(Term::compound("token", {r, core_hi_, pos_var()}));
    Term list = Term::constant("[]");
    for (auto it = options.rbegin(); it != options.rend(); ++it)
      list = Term::compound(".", {*it, list});
    rc_asks_.push_back(Term::compound("member", {r, list}));
  }

  void compile_left_context() {
    if (p_.left_context.empty()) return;
    Term lo = pos_var();
    compile_items(p_.left_context, lo, &core_lo_, lc_heads_, lc_asks_);
  }

  void assemble_heads() {
    std::vector<std::size_t> span_to_textual;
    if (p_.simplification) {
      rule_.kept = lc_heads_;
      rule_.kept.insert(rule_.kept.end(), rc_heads_.begin(), rc_heads_.end());
      rule_.removed = core_heads_;
      std::size_t kc = rule_.kept.size();
      for (std::size_t i = 0; i < lc_heads_.size(); ++i) span_to_textual.push_back(i);
      for (std::size_t i = 0; i < core_heads_.size(); ++i)
        span_to_textual.push_back(kc + i);
      for (std::size_t i = 0; i < rc_heads_.size(); ++i)
        span_to_textual.push_back(lc_heads_.size() + i);
    } else {
      rule_.kept = lc_heads_;
      rule_.kept.insert(rule_.kept.end(), core_heads_.begin(), core_heads_.end());
      rule_.kept.insert(rule_.kept.end(), rc_heads_.begin(), rc_heads_.end());
      for (std::size_t i = 0; i < rule_.kept.size(); ++i) span_to_textual.push_back(i);
    }
    rule_.passive.assign(rule_.head_count(), false);
    if (lr_) {
      rule_.passive.assign(rule_.head_count(), true);
      rule_.passive[leftmost_ ? span_to_textual.front() : span_to_textual.back()] =
          false;
    }
    for (const Term& a : lc_asks_) rule_.guard_ask.push_back(a);
    for (const Term& a : core_asks_) rule_.guard_ask.push_back(a);
    for (const Term& a : rc_asks_) rule_.guard_ask.push_back(a);
    rule_.guard_tell = tells_;
  }

  void compile_produced() {
    int result = -1;
    for (std::size_t i = 0; i < p_.produced.size(); ++i)
      if (p_.produced[i].kind == GItem::Kind::NonTerminal)
        result = static_cast<int>(i);
    if (result < 0) fail("production must produce a nonterminal");
    std::vector<GoalPtr> goals;
    for (std::size_t i = 0; i < p_.produced.size(); ++i) {
      const GItem& it = p_.produced[i];
      switch (it.kind) {
        case GItem::Kind::Terminals:
          fail("terminal items are not supported on the produced side");
        case GItem::Kind::NonTerminal:
          goals.push_back(Goal::emit(static_cast<int>(i) == result
                                         ? positioned(it, core_lo_, core_hi_)
                                         : it.term));
          break;
        case GItem::Kind::Goal:
          goals.push_back(goal_from_term(it.term));
          break;
        case GItem::Kind::Assumption: {
          Term pred = Term::constant(it.term.head_sym());
          Term args = Term::constant("[]");
          if (it.term.is_compound()) {
            const auto& as = it.term.args();
            for (auto a = as.rbegin(); a != as.rend(); ++a)
              args = Term::compound(".", {*a, args});
          }
          std::vector<Term> call = {pred, args};
          if (it.op == "+" || it.op == "-" || it.op == "*") call.push_back(core_lo_);
          goals.push_back(Goal::emit(Term::compound(it.op, std::move(call))));
          break;
        }
      }
    }
    GoalPtr body = goals.back();
    for (std::size_t i = goals.size() - 1; i-- > 0;) body = Goal::conj(goals[i], body);
    rule_.body = body;
  }

  const Production& p_;
  bool lr_;
  bool leftmost_;
  Rule rule_;
  int npos_ = 0;
  Term core_lo_, core_hi_, end_;
  std::vector<Term> lc_heads_, core_heads_, rc_heads_;
  std::vector<Term> lc_asks_, core_asks_, rc_asks_;
  std::vector<std::pair<Term, Term>> tells_;
};

}  // namespace

std::vector<SymId> loop_check(const Grammar& g) {
  std::vector<SymId> order;
  std::unordered_map<SymId, std::vector<SymId>> edges;
  auto note = [&](SymId s) {
    if (std::find(order.begin(), order.end(), s) == order.end()) order.push_back(s);
  };
  for (const auto& c : g.clauses) {
    if (c.kind != Grammar::Clause::Kind::Production) continue;
    const Production& p = c.prod;
    std::size_t terminals = 0;
    const GItem* unit = nullptr;
    std::size_t nts = 0;
    for (const auto& it : p.core) {
      if (it.kind == GItem::Kind::Terminals) terminals += it.terminals.size();
      if (it.kind == GItem::Kind::NonTerminal) {
        ++nts;
        unit = &it;
      }
    }
    if (terminals != 0 || nts != 1) continue;
    const GItem* produced = nullptr;
    for (const auto& it : p.produced)
      if (it.kind == GItem::Kind::NonTerminal) produced = &it;
    if (!produced) continue;
    SymId from = produced->term.head_sym();
    SymId to = unit->term.head_sym();
    note(from);
    note(to);
    edges[from].push_back(to);
  }
  std::vector<SymId> looping;
  for (SymId n : order) {
    std::vector<SymId> stack = edges[n];
    std::unordered_set<SymId> seen;
    bool cyc = false;
    while (!stack.empty() && !cyc) {
      SymId s = stack.back();
      stack.pop_back();
      if (s == n) cyc = true;
      if (!seen.insert(s).second) continue;
      for (SymId t : edges[s]) stack.push_back(t);
    }
    if (cyc) looping.push_back(n);
  }
  return looping;
}

CompiledGrammar compile_grammar(const Grammar& g, const CompileOptions& opt) {
  CompiledGrammar out;

  std::vector<Sig> sigs;
  std::vector<Sig> produced_sigs;
  auto add_sig = [&](std::vector<Sig>& dst, const GItem& it, int line) {
    Sig s = item_sig(it);
    if (s.name == sym("token"))
      throw ParseError("nonterminal may not be named 'token' at line " +
                           std::to_string(line),
                       line, 1);
    if (std::find(dst.begin(), dst.end(), s) == dst.end()) dst.push_back(s);
  };
  for (const auto& c : g.clauses) {
    if (c.kind != Grammar::Clause::Kind::Production) continue;
    const Production& p = c.prod;
    auto scan = [&](const std::vector<GItem>& items) {
      for (const auto& it : items)
        if (it.kind == GItem::Kind::NonTerminal) add_sig(sigs, it, p.line);
    };
    scan(p.left_context);
    scan(p.core);
    for (const auto& alt : p.right_context) scan(alt);
    const GItem* result = nullptr;
    for (const auto& it : p.produced)
      if (it.kind == GItem::Kind::NonTerminal) result = &it;
    if (result) {
      add_sig(sigs, *result, p.line);
      add_sig(produced_sigs, *result, p.line);
    }
  }

  out.dedup = opt.dedup.value_or(g.dedup.value_or(false));
  out.lr = opt.lr ? *opt.lr : g.global_lr;

  Program& prog = out.program;
  if (out.dedup) {
    for (const Sig& s : sigs) {
      Rule r;
      r.name = "dedup_" + symbol_table::name(s.name);
      std::vector<Term> args;
      for (std::size_t i = 0; i < s.attrs; ++i)
        args.push_back(Term::var("X" + std::to_string(i + 1), next_var_serial()));
      args.push_back(Term::var("N0", next_var_serial()));
      args.push_back(Term::var("N1", next_var_serial()));
      Term head = Term::compound(s.name, std::move(args));
      r.kept = {head};
      r.removed = {head};
      r.body = Goal::mk_true();
      prog.add(std::move(r));
    }
  }
  if (uses_assumptions(g)) install_assumption_prelude(prog);
  for (const auto& [pred, arity] : g.abducibles)
    for (Rule& r : abducible_rules(pred, arity)) prog.add(std::move(r));
  for (const auto& [pred, arity] : g.negations)
    for (Rule& r : negation_rules(pred, arity)) prog.add(std::move(r));

  std::unordered_map<SymId, int> name_counts;
  int raw_count = 0;
  for (const auto& c : g.clauses) {
    if (c.kind == Grammar::Clause::Kind::Production) {
      const Production& p = c.prod;
      bool lr = opt.lr ? *opt.lr : (g.global_lr || p.lr_rule);
      Rule r = ProductionCompiler(p, lr, opt.lr_leftmost).compile();
      const GItem* result = nullptr;
      for (const auto& it : p.produced)
        if (it.kind == GItem::Kind::NonTerminal) result = &it;
      SymId rn = result->term.head_sym();
      r.name = symbol_table::name(rn) + "_" + std::to_string(++name_counts[rn]);
      prog.add(std::move(r));
    } else {
      Rule r = c.raw;
      if (r.name.empty()) r.name = "rule_" + std::to_string(++raw_count);
      prog.add(std::move(r));
    }
  }

  for (const Sig& s : sigs) out.nonterminal_keys.insert(functor_key(s.name, s.attrs + 2));
  out.final_goal = g.final_goal;

  // Start arity: prefer production signatures, else scan raw rules.
  auto raw_arity = [&](SymId name) -> std::optional<std::size_t> {
    std::optional<std::size_t> found;
    auto check = [&](const Term& t) {
      if (t.is_compound() && t.functor() == name) found = t.arity();
      if (t.is_const() && t.const_sym() == name && !found) found = 0;
    };
    std::vector<GoalPtr> stack;
    for (const auto& c : g.clauses) {
      if (c.kind != Grammar::Clause::Kind::Raw) continue;
      for (const Term& h : c.raw.kept) check(h);
      for (const Term& h : c.raw.removed) check(h);
      if (c.raw.body) stack.push_back(c.raw.body);
    }
    while (!stack.empty()) {
      GoalPtr gp = stack.back();
      stack.pop_back();
      if (!gp) continue;
      if (gp->kind == Goal::Kind::Emit) check(gp->callee);
      stack.push_back(gp->a);
      stack.push_back(gp->b);
      stack.push_back(gp->c);
    }
    return found;
  };
  if (g.start) {
    out.has_start = true;
    out.start = *g.start;
    const Sig* found = nullptr;
    for (const Sig& s : produced_sigs)
      if (s.name == *g.start) found = &s;
    if (!found)
      for (const Sig& s : sigs)
        if (s.name == *g.start) found = &s;
    if (found) {
      out.start_arity = found->attrs + 2;
    } else if (auto a = raw_arity(*g.start)) {
      out.start_arity = *a;
    } else if (g.production_count() > 0) {
      throw ParseError("start symbol is never produced", 1, 1);
    } else {
      out.start_arity = 2;
    }
  } else if (!produced_sigs.empty()) {
    out.has_start = true;
    out.start = produced_sigs.front().name;
    out.start_arity = produced_sigs.front().attrs + 2;
  }

  SymId eof = sym("eof");
  auto terminals_mention_eof = [&](const std::vector<GItem>& items) {
    for (const auto& it : items)
      if (it.kind == GItem::Kind::Terminals)
        for (const Term& t : it.terminals)
          if (t.is_const() && t.const_sym() == eof) return true;
    return false;
  };
  for (const auto& c : g.clauses) {
    if (c.kind == Grammar::Clause::Kind::Production) {
      const Production& p = c.prod;
      if (terminals_mention_eof(p.left_context) || terminals_mention_eof(p.core))
        out.wants_eof = true;
      for (const auto& alt : p.right_context)
        if (terminals_mention_eof(alt)) out.wants_eof = true;
    } else {
      for (const Term& h : c.raw.kept)
        if (mentions_const(h, eof)) out.wants_eof = true;
      for (const Term& h : c.raw.removed)
        if (mentions_const(h, eof)) out.wants_eof = true;
    }
  }
  return out;
}

}  // namespace chrg
