#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chrg {

using SymId = std::uint32_t;
using VarSerial = std::uint64_t;

// Variable serials below this value are rule-local slots (dense indices
// assigned when a rule is finalized); everything the reader or the engine
// creates lives at or above it, so the two spaces never collide.
inline constexpr VarSerial kGlobalVarBase = VarSerial{1} << 32;

// Process-wide interner for constant and functor names.
class symbol_table {
 public:
  static SymId intern(std::string_view name);
  static const std::string& name(SymId id);
};

inline SymId sym(std::string_view name) { return symbol_table::intern(name); }

// Immutable first-order term: variable, constant, integer, or compound.
// Compounds have arity >= 1; a would-be zero-arity compound is a constant.
class Term {
 public:
  enum class Kind : std::uint8_t { Var, Const, Int, Compound };

  Term() : Term(constant("[]")) {}

  static Term var(VarSerial serial);
  static Term var(std::string name, VarSerial serial);
  static Term constant(std::string_view name);
  static Term constant(SymId s);
  static Term integer(std::int64_t value);
  static Term compound(std::string_view functor, std::vector<Term> args);
  static Term compound(SymId functor, std::vector<Term> args);

  Kind kind() const { return kind_; }
  bool is_var() const { return kind_ == Kind::Var; }
  bool is_const() const { return kind_ == Kind::Const; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_compound() const { return kind_ == Kind::Compound; }

  VarSerial var_serial() const { return static_cast<VarSerial>(num_); }
  std::string var_name() const;  // falls back to _G<serial>
  bool var_named() const { return static_cast<bool>(vname_); }
  SymId const_sym() const { return static_cast<SymId>(num_); }
  std::int64_t int_value() const { return static_cast<std::int64_t>(num_); }

  SymId functor() const;
  std::size_t arity() const;
  const std::vector<Term>& args() const;

  // Functor symbol for compounds, constant symbol for constants.
  SymId head_sym() const;

  bool ground() const;
  void collect_vars(std::vector<VarSerial>& out) const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  explicit Term(Kind k) : kind_(k) {}

  struct CompoundData {
    SymId functor;
    std::vector<Term> args;
  };

  Kind kind_;
  std::uint64_t num_ = 0;  // Int value | Const sym | Var serial
  std::shared_ptr<const CompoundData> comp_;
  std::shared_ptr<const std::string> vname_;
};

// Triangular substitution with value semantics. Bindings may chain
// (X -> Y, Y -> t); apply resolves chains fully, so applying twice
// equals applying once. bind refuses cycles via an occurs check on the
// fully dereferenced value.
class Substitution {
 public:
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  bool bound(VarSerial v) const { return map_.count(v) != 0; }
  const Term* lookup(VarSerial v) const;

  // Shallow dereference: follow var bindings until unbound var or non-var.
  Term walk(Term t) const;
  // Deep resolution of every bound variable inside t.
  Term apply(const Term& t) const;

  // Unchecked insert; engine and unifier run the occurs check themselves.
  void bind(VarSerial v, Term t) { map_.insert_or_assign(v, std::move(t)); }
  void erase(VarSerial v) { map_.erase(v); }

  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

 private:
  std::unordered_map<VarSerial, Term> map_;
};

// True iff v occurs in t under s (t is walked as it is traversed).
bool occurs(VarSerial v, const Term& t, const Substitution& s);

// One-way matching: variables of `pattern` may be bound, `target` is
// opaque (its variables act as fresh constants). Returns the extended
// substitution or nullopt on clash, including inconsistent repeated
// pattern variables.
std::optional<Substitution> match(const Term& pattern, const Term& target,
                                  Substitution s);

// Full unification with occurs check.
std::optional<Substitution> unify(const Term& a, const Term& b,
                                  Substitution s);

Term apply(const Term& t, const Substitution& s);

// Rewrites t replacing every variable with a fresh one drawn from
// `counter` (shared variables stay shared via `seen`).
Term rename_term(const Term& t, std::unordered_map<VarSerial, Term>& seen,
                 VarSerial& counter);

// Fresh serials for reader/engine-created variables.
VarSerial next_var_serial();

}  // namespace chrg
