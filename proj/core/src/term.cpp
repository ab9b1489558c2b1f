#include "chrg/term.hpp"

#include <atomic>
#include <mutex>
#include <stdexcept>

namespace chrg {

namespace {

struct SymbolStore {
  std::mutex mu;
  std::vector<std::string> names;
  std::unordered_map<std::string, SymId> ids;
};

SymbolStore& symbols() {
  static SymbolStore store;
  return store;
}

}  // namespace

SymId symbol_table::intern(std::string_view name) {
  auto& st = symbols();
  std::lock_guard<std::mutex> lock(st.mu);
  auto it = st.ids.find(std::string(name));
  if (it != st.ids.end()) return it->second;
  SymId id = static_cast<SymId>(st.names.size());
  st.names.emplace_back(name);
  st.ids.emplace(st.names.back(), id);
  return id;
}

const std::string& symbol_table::name(SymId id) {
  auto& st = symbols();
  std::lock_guard<std::mutex> lock(st.mu);
  return st.names.at(id);
}

VarSerial next_var_serial() {
  static std::atomic<VarSerial> counter{kGlobalVarBase};
  return counter.fetch_add(1);
}

Term Term::var(VarSerial serial) {
  Term t(Kind::Var);
  t.num_ = serial;
  t.comp_ = nullptr;
  t.vname_ = nullptr;
  return t;
}

Term Term::var(std::string name, VarSerial serial) {
  Term t = var(serial);
  if (!name.empty() && name != "_")
    t.vname_ = std::make_shared<const std::string>(std::move(name));
  return t;
}

Term Term::constant(std::string_view name) { return constant(sym(name)); }

Term Term::constant(SymId s) {
  Term t(Kind::Const);
  t.num_ = s;
  t.comp_ = nullptr;
  t.vname_ = nullptr;
  return t;
}

Term Term::integer(std::int64_t value) {
  Term t(Kind::Int);
  t.num_ = static_cast<std::uint64_t>(value);
  t.comp_ = nullptr;
  t.vname_ = nullptr;
  return t;
}

Term Term::compound(std::string_view functor, std::vector<Term> args) {
  return compound(sym(functor), std::move(args));
}

Term Term::compound(SymId functor, std::vector<Term> args) {
  if (args.empty()) return constant(functor);
  Term t(Kind::Compound);
  t.comp_ = std::make_shared<const CompoundData>(
      CompoundData{functor, std::move(args)});
  t.vname_ = nullptr;
  return t;
}

std::string Term::var_name() const {
  if (vname_) return *vname_;
  return "_G" + std::to_string(var_serial());
}

SymId Term::functor() const { return comp_->functor; }

std::size_t Term::arity() const {
  return kind_ == Kind::Compound ? comp_->args.size() : 0;
}

const std::vector<Term>& Term::args() const { return comp_->args; }

SymId Term::head_sym() const {
  return kind_ == Kind::Compound ? comp_->functor : const_sym();
}

bool Term::ground() const {
  switch (kind_) {
    case Kind::Var:
      return false;
    case Kind::Const:
    case Kind::Int:
      return true;
    case Kind::Compound:
      for (const Term& a : comp_->args)
        if (!a.ground()) return false;
      return true;
  }
  return true;
}

void Term::collect_vars(std::vector<VarSerial>& out) const {
  switch (kind_) {
    case Kind::Var:
      out.push_back(var_serial());
      return;
    case Kind::Compound:
      for (const Term& a : comp_->args) a.collect_vars(out);
      return;
    default:
      return;
  }
}

bool operator==(const Term& a, const Term& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Term::Kind::Var:
    case Term::Kind::Const:
    case Term::Kind::Int:
      return a.num_ == b.num_;
    case Term::Kind::Compound: {
      if (a.comp_ == b.comp_) return true;
      if (a.comp_->functor != b.comp_->functor) return false;
      if (a.comp_->args.size() != b.comp_->args.size()) return false;
      for (std::size_t i = 0; i < a.comp_->args.size(); ++i)
        if (!(a.comp_->args[i] == b.comp_->args[i])) return false;
      return true;
    }
  }
  return false;
}

const Term* Substitution::lookup(VarSerial v) const {
  auto it = map_.find(v);
  return it == map_.end() ? nullptr : &it->second;
}

Term Substitution::walk(Term t) const {
  while (t.is_var()) {
    const Term* b = lookup(t.var_serial());
    if (!b) return t;
    t = *b;
  }
  return t;
}

Term Substitution::apply(const Term& t) const {
  Term w = walk(t);
  if (!w.is_compound()) return w;
  bool changed = false;
  std::vector<Term> out;
  out.reserve(w.arity());
  for (const Term& a : w.args()) {
    out.push_back(apply(a));
    if (!(out.back() == a)) changed = true;
  }
  if (!changed) return w;
  return Term::compound(w.functor(), std::move(out));
}

bool occurs(VarSerial v, const Term& t, const Substitution& s) {
  Term w = s.walk(t);
  if (w.is_var()) return w.var_serial() == v;
  if (!w.is_compound()) return false;
  for (const Term& a : w.args())
    if (occurs(v, a, s)) return true;
  return false;
}

namespace {

// Pattern side is walked through s; target side is never walked, so
// target variables behave as frozen constants. A pattern variable bound
// earlier re-enters as its captured target material, and the recursion
// then demands exact agreement with the current target subterm.
bool match_rec(const Term& pattern, const Term& target, Substitution& s) {
  Term p = s.walk(pattern);
  if (p.is_var()) {
    if (target.is_var() && p.var_serial() == target.var_serial()) return true;
    s.bind(p.var_serial(), target);
    return true;
  }
  switch (p.kind()) {
    case Term::Kind::Const:
      return target.is_const() && p.const_sym() == target.const_sym();
    case Term::Kind::Int:
      return target.is_int() && p.int_value() == target.int_value();
    case Term::Kind::Compound: {
      if (!target.is_compound()) return false;
      if (p.functor() != target.functor() || p.arity() != target.arity())
        return false;
      for (std::size_t i = 0; i < p.arity(); ++i)
        if (!match_rec(p.args()[i], target.args()[i], s)) return false;
      return true;
    }
    default:
      return false;
  }
}

}  // namespace

std::optional<Substitution> match(const Term& pattern, const Term& target,
                                  Substitution s) {
  if (!match_rec(pattern, target, s)) return std::nullopt;
  return s;
}

std::optional<Substitution> unify(const Term& a, const Term& b,
                                  Substitution s) {
  Term wa = s.walk(a);
  Term wb = s.walk(b);
  if (wa.is_var() && wb.is_var() && wa.var_serial() == wb.var_serial())
    return s;
  if (wa.is_var()) {
    if (occurs(wa.var_serial(), wb, s)) return std::nullopt;
    s.bind(wa.var_serial(), wb);
    return s;
  }
  if (wb.is_var()) {
    if (occurs(wb.var_serial(), wa, s)) return std::nullopt;
    s.bind(wb.var_serial(), wa);
    return s;
  }
  if (wa.kind() != wb.kind()) return std::nullopt;
  switch (wa.kind()) {
    case Term::Kind::Const:
      return wa.const_sym() == wb.const_sym() ? std::optional(s)
                                              : std::nullopt;
    case Term::Kind::Int:
      return wa.int_value() == wb.int_value() ? std::optional(s)
                                              : std::nullopt;
    case Term::Kind::Compound: {
      if (wa.functor() != wb.functor() || wa.arity() != wb.arity())
        return std::nullopt;
      std::optional<Substitution> cur = std::move(s);
      for (std::size_t i = 0; i < wa.arity(); ++i) {
        cur = unify(wa.args()[i], wb.args()[i], std::move(*cur));
        if (!cur) return std::nullopt;
      }
      return cur;
    }
    default:
      return std::nullopt;
  }
}

Term apply(const Term& t, const Substitution& s) { return s.apply(t); }

Term rename_term(const Term& t, std::unordered_map<VarSerial, Term>& seen,
                 VarSerial& counter) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = seen.find(t.var_serial());
      if (it != seen.end()) return it->second;
      Term fresh = Term::var(t.var_name(), counter++);
      seen.emplace(t.var_serial(), fresh);
      return fresh;
    }
    case Term::Kind::Compound: {
      std::vector<Term> args;
      args.reserve(t.arity());
      for (const Term& a : t.args()) args.push_back(rename_term(a, seen, counter));
      return Term::compound(t.functor(), std::move(args));
    }
    default:
      return t;
  }
}

}  // namespace chrg
