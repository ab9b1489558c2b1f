#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chrg/grammar.hpp"
#include "chrg/term_io.hpp"
#include "parse_common.hpp"

namespace chrg {

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

bool assume_op(const std::string& s) {
  return s == "+" || s == "-" || s == "*" || s == "=+" || s == "=-" || s == "=*";
}

// Clause syntax:
//   :- start(name).  :- modeLR.  :- dedup(on|off).
//   :- abducible(p/n).  :- negation(p/n).  :- final(Goal).
//   [name @] [ruleLR] [lc -\] core [/- rc] (--> | <->) produced .
//   [name @ [#retry]] heads [\ removed] (==> | <=>) [guard |] body .
// Items: [t1,t2], name(attrs), {Goal}, +p(...), =*p(...), ...
// Guards chain with '&'; '=' units are tells, the rest asks.
class GrammarParser {
 public:
  explicit GrammarParser(std::string_view src) : lx_(src), tp_(lx_, scope_) {}

  Grammar parse() {
    while (lx_.peek().kind != Tok::End) {
      scope_.clear();
      parse_clause();
    }
    return std::move(g_);
  }

 private:
  bool glyph_is(std::string_view s) const {
    return lx_.peek().kind == Tok::Glyph && lx_.peek().text == s;
  }
  bool punct_is(std::string_view s) const {
    return lx_.peek().kind == Tok::Punct && lx_.peek().text == s;
  }
  void expect_punct(std::string_view s) {
    if (!punct_is(s)) lx_.fail("expected '" + std::string(s) + "'");
    lx_.next();
  }
  void expect_glyph(std::string_view s) {
    if (!glyph_is(s)) lx_.fail("expected '" + std::string(s) + "'");
    lx_.next();
  }
  void expect_end() {
    if (lx_.peek().kind != Tok::EndClause) lx_.fail("expected '.'");
    lx_.next();
  }
  std::string expect_atom() {
    if (lx_.peek().kind != Tok::Atom && lx_.peek().kind != Tok::Quoted)
      lx_.fail("expected an atom");
    return lx_.next().text;
  }

  Term parse_compound_args(const std::string& functor) {
    expect_punct("(");
    std::vector<Term> args;
    args.push_back(tp_.parse_term());
    while (punct_is(",")) {
      lx_.next();
      args.push_back(tp_.parse_term());
    }
    expect_punct(")");
    return Term::compound(functor, std::move(args));
  }

  // Continues - and + infix parsing after an already-read primary.
  Term continue_infix(Term t) {
    while (glyph_is("-")) {
      lx_.next();
      t = Term::compound("-", {t, tp_.parse_primary()});
    }
    if (glyph_is("+")) {
      lx_.next();
      return Term::compound("+", {t, tp_.parse_term()});
    }
    return t;
  }

  Term finish_atom_term(const Token& t) {
    Term prim = lx_.tight_lparen() ? parse_compound_args(t.text)
                                   : Term::constant(t.text);
    return continue_infix(prim);
  }

  // Goal terms: ';' > '->' > ',' > unit, all right-associative.
  Term parse_goal_term() { return parse_semi(); }

  Term parse_semi() {
    Term t = parse_arrow();
    if (punct_is(";")) {
      lx_.next();
      return Term::compound(";", {t, parse_semi()});
    }
    return t;
  }

  Term parse_arrow() {
    Term t = parse_conj();
    if (glyph_is("->")) {
      lx_.next();
      return Term::compound("->", {t, parse_arrow()});
    }
    return t;
  }

  Term parse_conj() {
    Term t = parse_unit_goal();
    if (punct_is(",")) {
      lx_.next();
      return Term::compound(",", {t, parse_conj()});
    }
    return t;
  }

  Term parse_unit_goal() {
    if (punct_is("(")) {
      lx_.next();
      Term t = parse_semi();
      expect_punct(")");
      return t;
    }
    Term t = tp_.parse_term();
    if (lx_.peek().kind == Tok::Glyph) {
      const std::string g = lx_.peek().text;
      if (g == "=" || g == "\\=" || g == "<") {
        lx_.next();
        Term rhs = tp_.parse_term();
        return Term::compound(g, {t, rhs});
      }
    }
    return t;
  }

  GItem parse_element() {
    GItem it;
    const Token& p = lx_.peek();
    if (p.kind == Tok::Punct && p.text == "[") {
      lx_.next();
      it.kind = GItem::Kind::Terminals;
      if (punct_is("]")) {
        lx_.next();
        return it;
      }
      it.terminals.push_back(tp_.parse_term());
      while (punct_is(",")) {
        lx_.next();
        it.terminals.push_back(tp_.parse_term());
      }
      expect_punct("]");
      return it;
    }
    if (p.kind == Tok::Punct && p.text == "{") {
      lx_.next();
      it.kind = GItem::Kind::Goal;
      it.term = parse_goal_term();
      expect_punct("}");
      return it;
    }
    if (p.kind == Tok::Glyph && assume_op(p.text)) {
      Token op = lx_.next();
      if (lx_.tight_lparen()) {
        it.kind = GItem::Kind::NonTerminal;
        it.term = continue_infix(parse_compound_args(op.text));
        return it;
      }
      if (lx_.peek().kind != Tok::Atom && lx_.peek().kind != Tok::Quoted)
        lx_.fail("expected a predicate after '" + op.text + "'");
      Token pred = lx_.next();
      it.kind = GItem::Kind::Assumption;
      it.op = op.text;
      it.term = lx_.tight_lparen() ? parse_compound_args(pred.text)
                                   : Term::constant(pred.text);
      return it;
    }
    it.kind = GItem::Kind::NonTerminal;
    it.term = tp_.parse_term();
    return it;
  }

  bool eat_passive() {
    if (!glyph_is("#")) return false;
    lx_.next();
    if (lx_.peek().kind == Tok::Atom && lx_.peek().text == "passive") {
      lx_.next();
      return true;
    }
    lx_.fail("expected 'passive'");
  }

  std::vector<GItem> parse_items_comma() {
    std::vector<GItem> v;
    v.push_back(parse_element());
    while (punct_is(",")) {
      lx_.next();
      v.push_back(parse_element());
    }
    return v;
  }

  void check_no_passive(const std::vector<bool>& flags) {
    for (bool f : flags)
      if (f) lx_.fail("passive markers apply to rule heads");
  }

  std::vector<Term> items_to_terms(std::vector<GItem>& items) {
    std::vector<Term> out;
    for (GItem& it : items) {
      if (it.kind != GItem::Kind::NonTerminal)
        lx_.fail("only plain constraints may appear in a rule head");
      out.push_back(std::move(it.term));
    }
    return out;
  }

  void add_guard_unit(Rule& r, const Term& u) {
    if (u.is_compound() && u.arity() == 2 && u.functor() == sym(",")) {
      add_guard_unit(r, u.args()[0]);
      add_guard_unit(r, u.args()[1]);
      return;
    }
    if (u.is_compound() && u.arity() == 2 &&
        (u.functor() == sym(";") || u.functor() == sym("->")))
      lx_.fail("control constructs are not allowed in a guard");
    if (u.is_compound() && u.arity() == 2 && u.functor() == sym("="))
      r.guard_tell.emplace_back(u.args()[0], u.args()[1]);
    else
      r.guard_ask.push_back(u);
  }

  void parse_raw_tail(Rule& r) {
    Term first = parse_semi();
    if (glyph_is("&") || punct_is("|")) {
      std::vector<Term> units{first};
      while (glyph_is("&")) {
        lx_.next();
        units.push_back(parse_semi());
      }
      expect_punct("|");
      for (const Term& u : units) add_guard_unit(r, u);
      r.body = goal_from_term(parse_semi());
    } else {
      r.body = goal_from_term(first);
    }
  }

  void parse_right_context(Production& prod) {
    if (punct_is("(")) {
      lx_.next();
      for (;;) {
        prod.right_context.push_back(parse_items_comma());
        if (punct_is(";")) {
          lx_.next();
          continue;
        }
        expect_punct(")");
        return;
      }
    }
    prod.right_context.push_back(parse_items_comma());
  }

  void parse_directive() {
    if (lx_.peek().kind != Tok::Atom) lx_.fail("expected a directive name");
    std::string d = lx_.next().text;
    if (d == "modeLR") {
      g_.global_lr = true;
      expect_end();
      return;
    }
    expect_punct("(");
    if (d == "start") {
      g_.start = sym(expect_atom());
    } else if (d == "dedup") {
      std::string v = expect_atom();
      if (v == "on")
        g_.dedup = true;
      else if (v == "off")
        g_.dedup = false;
      else
        lx_.fail("dedup takes on or off");
    } else if (d == "abducible" || d == "negation") {
      std::string p = expect_atom();
      expect_glyph("/");
      if (lx_.peek().kind != Tok::Int) lx_.fail("expected an arity");
      auto n = static_cast<std::size_t>(lx_.next().ival);
      (d == "abducible" ? g_.abducibles : g_.negations).emplace_back(sym(p), n);
    } else if (d == "final") {
      g_.final_goal = goal_from_term(parse_semi());
    } else {
      lx_.fail("unknown directive '" + d + "'");
    }
    expect_punct(")");
    expect_end();
  }

  void parse_clause() {
    int line = lx_.peek().line;
    if (glyph_is(":-")) {
      lx_.next();
      parse_directive();
      return;
    }

    std::string name;
    bool retry = false;
    bool lr_flag = false;
    std::optional<GItem> pending;

    if (lx_.peek().kind == Tok::Atom) {
      Token t = lx_.next();
      if (glyph_is("@")) {
        name = t.text;
        lx_.next();
        if (glyph_is("#")) {
          lx_.next();
          if (lx_.peek().kind == Tok::Atom && lx_.peek().text == "retry")
            lx_.next();
          else
            lx_.fail("expected 'retry'");
          retry = true;
        }
      } else if (t.text == "ruleLR" && !lx_.tight_lparen()) {
        lr_flag = true;
      } else {
        GItem it;
        it.kind = GItem::Kind::NonTerminal;
        it.term = finish_atom_term(t);
        pending = std::move(it);
      }
    }
    if (!pending && !lr_flag && lx_.peek().kind == Tok::Atom &&
        lx_.peek().text == "ruleLR") {
      Token t = lx_.next();
      if (lx_.tight_lparen()) {
        GItem it;
        it.kind = GItem::Kind::NonTerminal;
        it.term = finish_atom_term(t);
        pending = std::move(it);
      } else {
        lr_flag = true;
      }
    }

    std::vector<GItem> items;
    std::vector<bool> passim;
    auto push_item = [&](GItem it) {
      items.push_back(std::move(it));
      passim.push_back(eat_passive());
    };
    if (pending) {
      items.push_back(std::move(*pending));
      passim.push_back(eat_passive());
    } else {
      push_item(parse_element());
    }

    Production prod;
    prod.line = line;
    prod.lr_rule = lr_flag;

    for (;;) {
      if (punct_is(",")) {
        lx_.next();
        push_item(parse_element());
        continue;
      }
      if (glyph_is("-\\")) {
        if (!prod.left_context.empty()) lx_.fail("duplicate left context");
        check_no_passive(passim);
        prod.left_context = std::move(items);
        items.clear();
        passim.clear();
        lx_.next();
        push_item(parse_element());
        continue;
      }
      break;
    }

    bool rc_done = false;
    if (glyph_is("/-")) {
      check_no_passive(passim);
      prod.core = std::move(items);
      items.clear();
      passim.clear();
      lx_.next();
      parse_right_context(prod);
      rc_done = true;
    }

    if (glyph_is("-->") || glyph_is("<->")) {
      prod.simplification = lx_.peek().text == "<->";
      lx_.next();
      if (retry) lx_.fail("'#retry' applies to rules");
      if (!rc_done) {
        check_no_passive(passim);
        prod.core = std::move(items);
      }
      prod.produced = parse_items_comma();
      expect_end();
      Grammar::Clause c;
      c.kind = Grammar::Clause::Kind::Production;
      c.prod = std::move(prod);
      g_.clauses.push_back(std::move(c));
      return;
    }

    if (rc_done || !prod.left_context.empty() || lr_flag)
      lx_.fail("expected '-->' or '<->'");

    Rule r;
    r.name = name;
    r.retry_on_backtrack = retry;
    std::vector<Term> heads = items_to_terms(items);
    std::vector<bool> hpass = passim;
    if (glyph_is("\\")) {
      lx_.next();
      std::vector<GItem> rem_items;
      std::vector<bool> rem_pass;
      rem_items.push_back(parse_element());
      rem_pass.push_back(eat_passive());
      while (punct_is(",")) {
        lx_.next();
        rem_items.push_back(parse_element());
        rem_pass.push_back(eat_passive());
      }
      expect_glyph("<=>");
      r.kept = std::move(heads);
      r.removed = items_to_terms(rem_items);
      r.passive = hpass;
      r.passive.insert(r.passive.end(), rem_pass.begin(), rem_pass.end());
    } else if (glyph_is("==>")) {
      lx_.next();
      r.kept = std::move(heads);
      r.passive = hpass;
    } else if (glyph_is("<=>")) {
      lx_.next();
      r.removed = std::move(heads);
      r.passive = hpass;
    } else {
      lx_.fail("expected a rule or production operator");
    }
    parse_raw_tail(r);
    expect_end();

    Grammar::Clause c;
    c.kind = Grammar::Clause::Kind::Raw;
    c.raw = std::move(r);
    g_.clauses.push_back(std::move(c));
  }

  Lexer lx_;
  VarScope scope_;
  detail::TermParser tp_;
  Grammar g_;
};

}  // namespace

Grammar parse_grammar_source(std::string_view text) {
  return GrammarParser(text).parse();
}

}  // namespace chrg
