#include "chrg/term_io.hpp"

#include <string>

#include "parse_common.hpp"

namespace chrg {

namespace {

// Infix precedence of the outermost operator; 0 for non-operator terms.
// '-' (400, left-associative) binds tighter than '+' (500, right-
// associative, so a + b + c needs no parentheses for a right spine).
int outer_prec(const Term& t) {
  if (t.is_compound() && t.arity() == 2) {
    if (t.functor() == sym("+")) return 500;
    if (t.functor() == sym("-")) return 400;
  }
  return 0;
}

void print_rec(const Term& t, int limit, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out += t.var_name();
      return;
    case Term::Kind::Int:
      out += std::to_string(t.int_value());
      return;
    case Term::Kind::Const: {
      const std::string& name = symbol_table::name(t.const_sym());
      if (name == "[]" || plain_atom_name(name)) {
        out += name;
      } else {
        out += quote_atom(name);
      }
      return;
    }
    case Term::Kind::Compound:
      break;
  }

  const std::string& f = symbol_table::name(t.functor());
  if (f == "." && t.arity() == 2) {
    out += '[';
    const Term* cell = &t;
    bool first = true;
    while (cell->is_compound() && cell->arity() == 2 && cell->functor() == sym(".")) {
      if (!first) out += ',';
      first = false;
      print_rec(cell->args()[0], 999, out);
      cell = &cell->args()[1];
    }
    if (!(cell->is_const() && cell->const_sym() == sym("[]"))) {
      out += '|';
      print_rec(*cell, 999, out);
    }
    out += ']';
    return;
  }
  if (f == "," && t.arity() == 2) {
    out += '(';
    const Term* cell = &t;
    while (cell->is_compound() && cell->arity() == 2 && cell->functor() == sym(",")) {
      print_rec(cell->args()[0], 999, out);
      out += ',';
      cell = &cell->args()[1];
    }
    print_rec(*cell, 999, out);
    out += ')';
    return;
  }
  int prec = outer_prec(t);
  if (prec != 0) {
    bool right_assoc = prec == 500;
    bool paren = prec > limit;
    if (paren) out += '(';
    print_rec(t.args()[0], right_assoc ? prec - 1 : prec, out);
    out += right_assoc ? " + " : "-";
    std::string rhs;
    print_rec(t.args()[1], right_assoc ? prec : prec - 1, rhs);
    if (!right_assoc && !rhs.empty() && rhs[0] == '-') out += ' ';
    out += rhs;
    if (paren) out += ')';
    return;
  }
  out += plain_atom_name(f) ? f : quote_atom(f);
  out += '(';
  for (size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    print_rec(t.args()[i], 999, out);
  }
  out += ')';
}

}  // namespace

bool plain_atom_name(std::string_view name) {
  if (name.empty()) return false;
  if (!std::islower(static_cast<unsigned char>(name[0]))) return false;
  for (char c : name) {
    if (c != '_' && !std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string quote_atom(std::string_view name) {
  std::string s = "'";
  for (char c : name) {
    switch (c) {
      case '\'': s += "\\'"; break;
      case '\\': s += "\\\\"; break;
      case '\n': s += "\\n"; break;
      case '\t': s += "\\t"; break;
      default: s.push_back(c);
    }
  }
  s += '\'';
  return s;
}

std::string print_term(const Term& t) {
  std::string out;
  print_rec(t, 1200, out);
  return out;
}

Term read_term(std::string_view src, VarScope& scope) {
  detail::Lexer lx(src);
  detail::TermParser tp(lx, scope);
  Term t = tp.parse_term();
  if (lx.peek().kind == detail::Tok::EndClause) lx.next();
  if (lx.peek().kind != detail::Tok::End) lx.fail("trailing input after term");
  return t;
}

Term read_term(std::string_view src) {
  VarScope scope;
  return read_term(src, scope);
}

}  // namespace chrg
