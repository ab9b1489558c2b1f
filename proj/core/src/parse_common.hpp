#pragma once

// Lexer and term parser shared by the term reader and the grammar parser.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chrg/errors.hpp"
#include "chrg/term.hpp"
#include "chrg/term_io.hpp"

namespace chrg::detail {

enum class Tok {
  Atom,      // lowercase identifier
  Var,       // uppercase/underscore identifier
  Int,       // digit run
  Quoted,    // 'quoted atom'
  Glyph,     // maximal run of symbol characters: + - * / \ ^ < > = ~ : ? @ # &
  Punct,     // one of ( ) [ ] { } , | ;
  EndClause, // '.' followed by layout or end of input
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t ival = 0;
  int line = 1;
  int col = 1;
};

inline bool glyph_char(char c) {
  switch (c) {
    case '+': case '-': case '*': case '/': case '\\': case '^':
    case '<': case '>': case '=': case '~': case ':': case '?':
    case '@': case '#': case '&':
      return true;
    default:
      return false;
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token next() {
    Token t = cur_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at line " + std::to_string(cur_.line) +
                         ", column " + std::to_string(cur_.col),
                     cur_.line, cur_.col);
  }

  // True when the token just returned by next() was immediately followed
  // by '(' with no intervening layout; distinguishes f( from f (.
  bool tight_lparen() const {
    return cur_.kind == Tok::Punct && cur_.text == "(" && !had_layout_;
  }

 private:
  void advance() {
    skip_layout();
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      cur_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (c == '.') {
      size_t after = pos_ + 1;
      if (after >= src_.size() || std::isspace(static_cast<unsigned char>(src_[after])) ||
          src_[after] == '%') {
        bump();
        cur_.kind = Tok::EndClause;
        cur_.text = ".";
        return;
      }
      fail("unexpected '.'");
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits.push_back(src_[pos_]);
        bump();
      }
      cur_.kind = Tok::Int;
      cur_.text = digits;
      cur_.ival = std::stoll(digits);
      return;
    }
    if (c == '_' || std::isupper(static_cast<unsigned char>(c))) {
      cur_.kind = Tok::Var;
      cur_.text = ident();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      cur_.kind = Tok::Atom;
      cur_.text = ident();
      return;
    }
    if (c == '\'') {
      cur_.kind = Tok::Quoted;
      cur_.text = quoted();
      return;
    }
    switch (c) {
      case '(': case ')': case '[': case ']': case '{': case '}':
      case ',': case '|': case ';':
        cur_.kind = Tok::Punct;
        cur_.text = std::string(1, c);
        bump();
        return;
      default:
        break;
    }
    if (glyph_char(c)) {
      std::string run;
      while (pos_ < src_.size() && glyph_char(src_[pos_])) {
        run.push_back(src_[pos_]);
        bump();
      }
      cur_.kind = Tok::Glyph;
      cur_.text = run;
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string ident() {
    std::string s;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '_' || std::isalnum(static_cast<unsigned char>(c))) {
        s.push_back(c);
        bump();
      } else {
        break;
      }
    }
    return s;
  }

  std::string quoted() {
    bump();  // opening quote
    std::string s;
    while (true) {
      if (pos_ >= src_.size()) fail("unterminated quoted atom");
      char c = src_[pos_];
      if (c == '\'') {
        bump();
        if (pos_ < src_.size() && src_[pos_] == '\'') {  // '' inside quotes
          s.push_back('\'');
          bump();
          continue;
        }
        return s;
      }
      if (c == '\\') {
        bump();
        if (pos_ >= src_.size()) fail("unterminated escape");
        char e = src_[pos_];
        bump();
        switch (e) {
          case 'n': s.push_back('\n'); break;
          case 't': s.push_back('\t'); break;
          case '\\': s.push_back('\\'); break;
          case '\'': s.push_back('\''); break;
          default: fail(std::string("unknown escape '\\") + e + "'");
        }
        continue;
      }
      s.push_back(c);
      bump();
    }
  }

  void skip_layout() {
    had_layout_ = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        had_layout_ = true;
        bump();
      } else if (c == '%') {
        had_layout_ = true;
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  bool had_layout_ = false;
  Token cur_;
};

// Parses terms with the infix operators + (right-associative) and -
// (left-associative, binds tighter). Commas build tuples only inside
// parentheses.
class TermParser {
 public:
  TermParser(Lexer& lx, VarScope& scope) : lx_(lx), scope_(scope) {}

  Term parse_term() {
    Term t = parse_diff();
    if (lx_.peek().kind == Tok::Glyph && lx_.peek().text == "+") {
      lx_.next();
      return Term::compound("+", {t, parse_term()});
    }
    return t;
  }

  Term parse_diff() {
    Term t = parse_primary();
    while (lx_.peek().kind == Tok::Glyph && lx_.peek().text == "-") {
      lx_.next();
      t = Term::compound("-", {t, parse_primary()});
    }
    return t;
  }

  Term parse_primary() {
    const Token& p = lx_.peek();
    switch (p.kind) {
      case Tok::Int: {
        Token t = lx_.next();
        return Term::integer(t.ival);
      }
      case Tok::Var: {
        Token t = lx_.next();
        if (t.text == "_") return Term::var("_", next_var_serial());
        auto it = scope_.find(t.text);
        if (it != scope_.end()) return it->second;
        Term v = Term::var(t.text, next_var_serial());
        scope_.emplace(t.text, v);
        return v;
      }
      case Tok::Atom:
      case Tok::Quoted: {
        Token t = lx_.next();
        if (lx_.tight_lparen()) return parse_compound(t.text);
        return Term::constant(t.text);
      }
      case Tok::Glyph: {
        // '-' <int>  => negative literal; any glyph directly before '('
        // is a functor, e.g. +(h,[a],3).
        Token t = lx_.next();
        if (t.text == "-" && lx_.peek().kind == Tok::Int) {
          Token n = lx_.next();
          return Term::integer(-n.ival);
        }
        if (lx_.tight_lparen()) return parse_compound(t.text);
        return Term::constant(t.text);
      }
      case Tok::Punct:
        if (p.text == "[") return parse_list();
        if (p.text == "(") return parse_paren();
        lx_.fail("unexpected '" + p.text + "'");
      default:
        lx_.fail("expected a term");
    }
  }

 private:
  Term parse_compound(const std::string& functor) {
    expect_punct("(");
    std::vector<Term> args;
    args.push_back(parse_term());
    while (punct_is(",")) {
      lx_.next();
      args.push_back(parse_term());
    }
    expect_punct(")");
    return Term::compound(functor, std::move(args));
  }

  Term parse_list() {
    expect_punct("[");
    if (punct_is("]")) {
      lx_.next();
      return Term::constant("[]");
    }
    std::vector<Term> elems;
    elems.push_back(parse_term());
    while (punct_is(",")) {
      lx_.next();
      elems.push_back(parse_term());
    }
    Term tail = Term::constant("[]");
    if (punct_is("|")) {
      lx_.next();
      tail = parse_term();
    }
    expect_punct("]");
    for (auto it = elems.rbegin(); it != elems.rend(); ++it)
      tail = Term::compound(".", {*it, tail});
    return tail;
  }

  Term parse_paren() {
    expect_punct("(");
    std::vector<Term> items;
    items.push_back(parse_term());
    while (punct_is(",")) {
      lx_.next();
      items.push_back(parse_term());
    }
    expect_punct(")");
    Term t = items.back();
    for (size_t i = items.size() - 1; i-- > 0;)
      t = Term::compound(",", {items[i], t});
    return t;
  }

  bool punct_is(std::string_view s) const {
    return lx_.peek().kind == Tok::Punct && lx_.peek().text == s;
  }

  void expect_punct(std::string_view s) {
    if (!punct_is(s)) lx_.fail("expected '" + std::string(s) + "'");
    lx_.next();
  }

  Lexer& lx_;
  VarScope& scope_;
};

}  // namespace chrg::detail
